//! Fixed-order Gauss–Legendre rules.

/// 8-point Gauss–Legendre abscissae on `[-1, 1]` (positive half) and weights.
const NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `∫_a^b f` by the 8-point rule.
pub(crate) fn gauss_legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        s += w * (f(mid - half * x) + f(mid + half * x));
    }
    s * half
}

/// Composite rule over `pieces` equal subintervals.
pub(crate) fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, pieces: usize, mut f: F) -> f64 {
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|p| {
            let lo = a + p as f64 * w;
            gauss_legendre(lo, lo + w, &mut f)
        })
        .sum()
}
