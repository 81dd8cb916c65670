use std::fmt;

use crate::error::{Error, Result};

/// Daubechies scaling (low-pass) filter and its quadrature-mirror wavelet filter.
///
/// `h` follows the minimum-phase convention, so `db2` starts with
/// `(1 + √3) / (4√2)`. The wavelet filter is `g[k] = (-1)^k h[L-1-k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletFilter {
    name: String,
    h: Vec<f64>,
    g: Vec<f64>,
}

/// Names accepted by [`WaveletFilter::daubechies`].
pub const SUPPORTED_FILTERS: [&str; 10] = [
    "db1", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "db9", "db10",
];

impl WaveletFilter {
    /// Looks up a Daubechies filter by name (`db1` through `db10`).
    pub fn daubechies(name: &str) -> Result<Self> {
        let h: &[f64] = match name.trim().to_ascii_lowercase().as_str() {
            "db1" | "haar" => &DB1,
            "db2" => &DB2,
            "db3" => &DB3,
            "db4" => &DB4,
            "db5" => &DB5,
            "db6" => &DB6,
            "db7" => &DB7,
            "db8" => &DB8,
            "db9" => &DB9,
            "db10" => &DB10,
            _ => {
                return Err(Error::UnsupportedFilter {
                    name: name.to_string(),
                    supported: SUPPORTED_FILTERS.join(", "),
                })
            }
        };
        let name = format!("db{}", h.len() / 2);
        Ok(Self::from_scaling(name, h.to_vec()))
    }

    fn from_scaling(name: String, h: Vec<f64>) -> Self {
        let len = h.len();
        let g = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * h[len - 1 - k]
            })
            .collect();
        Self { name, h, g }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Scaling filter coefficients.
    pub fn scaling(&self) -> &[f64] {
        &self.h
    }

    /// Wavelet filter coefficients.
    pub fn wavelet(&self) -> &[f64] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Number of vanishing moments of the wavelet (N for dbN).
    pub fn vanishing_moments(&self) -> usize {
        self.h.len() / 2
    }
}

impl fmt::Display for WaveletFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Convenience wrapper around [`WaveletFilter::daubechies`].
pub fn make_filter(name: &str) -> Result<WaveletFilter> {
    WaveletFilter::daubechies(name)
}

// Minimum-phase Daubechies scaling filters, normalized to sum √2.
const DB1: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
];

const DB3: [f64; 6] = [
    0.33267055295008263,
    0.8068915093110925,
    0.45987750211849154,
    -0.13501102001025458,
    -0.08544127388202666,
    0.03522629188570954,
];

const DB4: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

const DB5: [f64; 10] = [
    0.1601023979741929,
    0.6038292697971896,
    0.7243085284377729,
    0.13842814590132074,
    -0.24229488706638203,
    -0.032244869584638375,
    0.07757149384004572,
    -0.006241490212798274,
    -0.012580751999081999,
    0.0033357252854737712,
];

const DB6: [f64; 12] = [
    0.11154074335010945,
    0.4946238903984531,
    0.7511339080210954,
    0.31525035170919763,
    -0.22626469396543983,
    -0.12976686756726194,
    0.09750160558732304,
    0.02752286553030573,
    -0.03158203931748603,
    0.0005538422011614961,
    0.004777257510945511,
    -0.0010773010853084796,
];

const DB7: [f64; 14] = [
    0.07785205408500918,
    0.3965393194819173,
    0.7291320908462351,
    0.4697822874051931,
    -0.14390600392856498,
    -0.22403618499387498,
    0.07130921926683026,
    0.08061260915108308,
    -0.03802993693501441,
    -0.01657454163066688,
    0.01255099855609984,
    0.0004295779729213665,
    -0.0018016407040474908,
    0.00035371379997452024,
];

const DB8: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
];

const DB9: [f64; 18] = [
    0.038077947363878345,
    0.24383467461259034,
    0.6048231236901112,
    0.6572880780513005,
    0.1331973858250076,
    -0.2932737832791749,
    -0.09684078322297646,
    0.14854074933810638,
    0.03072568147933338,
    -0.06763282906132997,
    0.00025094711483145197,
    0.022361662123679096,
    -0.004723204757751397,
    -0.004281503682463429,
    0.0018476468830562265,
    0.00023038576352319597,
    -0.0002519631889427101,
    3.9347320316271596e-05,
];

const DB10: [f64; 20] = [
    0.026670057900555554,
    0.1881768000776915,
    0.5272011889317256,
    0.6884590394536035,
    0.2811723436605775,
    -0.24984642432731538,
    -0.19594627437737705,
    0.12736934033579325,
    0.09305736460357235,
    -0.07139414716639708,
    -0.029457536821875813,
    0.033212674059341,
    0.0036065535669561697,
    -0.010733175483330575,
    0.0013953517470529013,
    0.001992405295185056,
    -0.0006858566949597116,
    -0.00011646685512928545,
    9.358867032006959e-05,
    -1.3264202894521244e-05,
];
