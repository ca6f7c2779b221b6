//! Published phase shifts (radians) used as reproduction targets.
//!
//! McDMM columns are kept for reporting only; they depend on step length
//! and on an outer propagator that is not reproduced here.

/// s-wave row: `k`, singlet McDMM at h = .004/.006/.008, singlet exact,
/// triplet McDMM at h = .004/.006/.008, triplet exact.
pub const S_WAVE: [(f64, [f64; 4], [f64; 4]); 15] = [
    (0.1, [1.138750, 1.134672, 1.171174, 2.527441], [2.944466, 2.944487, 2.944556, 2.948757]),
    (0.2, [1.996521, 1.995936, 1.996479, 2.034071], [2.735678, 2.735645, 2.735678, 2.735060]),
    (0.3, [1.649999, 1.650124, 1.650246, 1.665189], [2.527570, 2.527588, 2.527605, 2.523228]),
    (0.4, [1.372797, 1.372837, 1.372796, 1.384975], [2.329332, 2.329341, 2.329332, 2.322439]),
    (0.5, [1.157391, 1.157409, 1.157391, 1.168257], [2.146210, 2.146215, 2.146210, 2.137332]),
    (0.6, [0.991071, 0.991079, 0.991087, 1.000723], [1.980222, 1.980225, 1.980228, 1.969819]),
    (0.7, [0.865011, 0.865016, 0.865020, 0.873758], [1.831592, 1.831594, 1.831596, 1.819917]),
    (0.8, [0.772639, 0.772644, 0.772644, 0.779612], [1.699554, 1.699556, 1.699556, 1.743484]),
    (0.9, [0.708203, 0.708203, 0.708199, 0.713415], [1.582765, 1.582765, 1.582763, 1.621901]),
    (1.0, [0.666187, 0.666189, 0.666178, 0.670122], [1.479626, 1.479627, 1.479620, 1.507213]),
    (1.1, [0.641285, 0.641284, 0.641271, 0.644246], [1.388498, 1.388498, 1.388489, 1.407830]),
    (1.2, [0.628568, 0.628567, 0.628552, 0.630856], [1.307821, 1.307820, 1.307809, 1.320019]),
    (1.3, [0.623787, 0.623786, 0.623773, 0.625395], [1.236182, 1.236181, 1.236170, 1.242529]),
    (1.4, [0.623565, 0.623563, 0.623551, 0.624628], [1.172346, 1.172343, 1.172333, 1.174116]),
    (1.5, [0.625441, 0.625439, 0.625429, 0.626161], [1.115244, 1.115242, 1.115232, 1.113588]),
];

/// p-wave rows in the same layout as [`S_WAVE`].
pub const P_WAVE: [(f64, [f64; 4], [f64; 4]); 10] = [
    (0.1, [0.006806, 0.006806, 0.006805, 0.006873], [0.011107, 0.011107, 0.011105, 0.011161]),
    (0.2, [0.018017, 0.018017, 0.018016, 0.018043], [0.050578, 0.050577, 0.050576, 0.050605]),
    (0.3, [0.023633, 0.023633, 0.023633, 0.023657], [0.121599, 0.121599, 0.121599, 0.121611]),
    (0.4, [0.021210, 0.021210, 0.021209, 0.021230], [0.215073, 0.215072, 0.215072, 0.215060]),
    (0.5, [0.013588, 0.013588, 0.013588, 0.013606], [0.311177, 0.311177, 0.311176, 0.311150]),
    (0.6, [0.005301, 0.005301, 0.005301, 0.005314], [0.391342, 0.391342, 0.391342, 0.391291]),
    (0.7, [0.000175, 0.000175, 0.000175, 0.000185], [0.447613, 0.447613, 0.447613, 0.447559]),
    (0.8, [0.000478, 0.000478, 0.000478, 0.000486], [0.481454, 0.481454, 0.481453, 0.481395]),
    (0.9, [0.006922, 0.006922, 0.006922, 0.006933], [0.498186, 0.498186, 0.498186, 0.498122]),
    (1.0, [0.019049, 0.019049, 0.019049, 0.019062], [0.503268, 0.503268, 0.503268, 0.503206]),
];

/// Wavenumbers of the higher-partial-wave tables.
pub const HIGHER_K: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Higher partial waves, `[l − 2][k index] = (McDMM at h = .006, exact)`.
/// `None` marks a McDMM run reported as unstable.
pub type HigherTable = [[(Option<f64>, f64); 10]; 4];

pub const HIGHER_SINGLET: HigherTable = [
    [
        (Some(0.001287), 0.001344),
        (Some(0.005231), 0.005269),
        (Some(0.011215), 0.011234),
        (Some(0.018215), 0.018227),
        (Some(0.025156), 0.025163),
        (Some(0.031323), 0.031322),
        (Some(0.036537), 0.036534),
        (Some(0.041023), 0.041016),
        (Some(0.045182), 0.045174),
        (Some(0.049394), 0.049382),
    ],
    [
        (Some(0.000334), 0.000449),
        (Some(0.001765), 0.001795),
        (Some(0.004005), 0.004028),
        (Some(0.007071), 0.007085),
        (Some(0.010797), 0.010806),
        (Some(0.014959), 0.014962),
        (Some(0.019299), 0.019301),
        (Some(0.023616), 0.023610),
        (Some(0.027784), 0.027781),
        (Some(0.031763), 0.031756),
    ],
    [
        (None, 0.000204),
        (Some(0.000776), 0.000816),
        (Some(0.001817), 0.001837),
        (Some(0.003247), 0.003264),
        (Some(0.005074), 0.005084),
        (Some(0.007255), 0.007263),
        (Some(0.009737), 0.009741),
        (Some(0.012437), 0.012436),
        (Some(0.015271), 0.015269),
        (Some(0.018163), 0.018158),
    ],
    [
        (None, 0.000110),
        (Some(0.000401), 0.000439),
        (Some(0.000962), 0.000988),
        (Some(0.001743), 0.001758),
        (Some(0.002733), 0.002745),
        (Some(0.003942), 0.003949),
        (Some(0.005354), 0.005360),
        (Some(0.006953), 0.006958),
        (Some(0.008710), 0.008711),
        (Some(0.010593), 0.010591),
    ],
];

pub const HIGHER_TRIPLET: HigherTable = [
    [
        (Some(0.001295), 0.001358),
        (Some(0.005456), 0.005492),
        (Some(0.012687), 0.012706),
        (Some(0.023298), 0.023310),
        (Some(0.037315), 0.037320),
        (Some(0.054197), 0.054200),
        (Some(0.072899), 0.072899),
        (Some(0.092140), 0.092132),
        (Some(0.110743), 0.110721),
        (Some(0.127837), 0.127824),
    ],
    [
        (Some(0.000334), 0.000449),
        (Some(0.001768), 0.001798),
        (Some(0.004035), 0.004059),
        (Some(0.007249), 0.007262),
        (Some(0.011437), 0.011446),
        (Some(0.016625), 0.016628),
        (Some(0.022758), 0.022760),
        (Some(0.029699), 0.029696),
        (Some(0.037226), 0.037223),
        (Some(0.044079), 0.045069),
    ],
    [
        (None, 0.000204),
        (Some(0.000776), 0.000816),
        (Some(0.001818), 0.001837),
        (Some(0.003254), 0.003270),
        (Some(0.005110), 0.005120),
        (Some(0.007384), 0.007392),
        (Some(0.010084), 0.010088),
        (Some(0.013194), 0.013197),
        (Some(0.016684), 0.016684),
        (Some(0.020494), 0.020494),
    ],
    [
        (None, 0.000110),
        (Some(0.000401), 0.000439),
        (Some(0.000962), 0.000988),
        (Some(0.001743), 0.001758),
        (Some(0.002735), 0.002748),
        (Some(0.003953), 0.003961),
        (Some(0.005389), 0.005396),
        (Some(0.007049), 0.007053),
        (Some(0.008925), 0.008928),
        (Some(0.011006), 0.011007),
    ],
];

/// Step lengths of the McDMM columns.
pub const MCDMM_STEPS: [f64; 3] = [0.004, 0.006, 0.008];

/// Exact-exchange reference for `(l, spin, k)` if tabulated.
pub fn exact(l: u32, spin: u8, k: f64) -> Option<f64> {
    let close = |a: f64| (a - k).abs() < 1e-9;
    match l {
        0 => S_WAVE
            .iter()
            .find(|row| close(row.0))
            .map(|row| if spin == 0 { row.1[3] } else { row.2[3] }),
        1 => P_WAVE
            .iter()
            .find(|row| close(row.0))
            .map(|row| if spin == 0 { row.1[3] } else { row.2[3] }),
        2..=5 => {
            let table = if spin == 0 { &HIGHER_SINGLET } else { &HIGHER_TRIPLET };
            HIGHER_K
                .iter()
                .position(|&x| close(x))
                .map(|i| table[(l - 2) as usize][i].1)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_anchors() {
        assert_eq!(exact(0, 0, 0.2), Some(2.034071));
        assert_eq!(exact(1, 1, 0.5), Some(0.311150));
        assert_eq!(exact(3, 0, 0.5), Some(0.010806));
        assert_eq!(exact(2, 1, 1.0), Some(0.127824));
        assert_eq!(exact(6, 0, 0.5), None);
    }
}
