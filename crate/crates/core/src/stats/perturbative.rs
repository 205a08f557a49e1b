/// First-order amplitude of the pair `a_m^dag b_n^dag |0>` for a small
/// expansion: `(delta_l / 2) (-1)^(m+n) (m - n) / (m + n + 1)`.
///
/// Only meaningful for `|delta_l| << 1`; not enforced.
pub fn perturbative_pair_amplitude(m: usize, n: usize, delta_l: f64) -> f64 {
    let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
    0.5 * delta_l * sign * (m as f64 - n as f64) / (m + n + 1) as f64
}
