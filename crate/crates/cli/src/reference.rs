//! Published configurations the table commands regenerate.

/// One published `f'(0)` configuration with its homotopy-analysis value quoted verbatim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeRow {
    pub lam: &'static str,
    pub n: usize,
    pub c: f64,
    pub ham: &'static str,
}

pub const DRBF_ROWS: [SlopeRow; 6] = [
    SlopeRow { lam: "0", n: 10, c: 3.46543, ham: "0.94783" },
    SlopeRow { lam: "1/4", n: 12, c: 3.943, ham: "0.91119" },
    SlopeRow { lam: "1/3", n: 10, c: 4.9665, ham: "0.90103" },
    SlopeRow { lam: "1/2", n: 10, c: 5.36, ham: "0.87964" },
    SlopeRow { lam: "3/4", n: 12, c: 5.23, ham: "0.85242" },
    SlopeRow { lam: "1", n: 10, c: 5.89, ham: "0.82726" },
];

pub const IRBF_ROWS: [SlopeRow; 6] = [
    SlopeRow { lam: "0", n: 10, c: 1.860, ham: "0.94783" },
    SlopeRow { lam: "1/4", n: 10, c: 2.005, ham: "0.91119" },
    SlopeRow { lam: "1/3", n: 10, c: 2.050, ham: "0.90103" },
    SlopeRow { lam: "1/2", n: 10, c: 2.150, ham: "0.87964" },
    SlopeRow { lam: "3/4", n: 10, c: 2.418, ham: "0.85242" },
    SlopeRow { lam: "1", n: 10, c: 2.380, ham: "0.82726" },
];

/// Flux exponents of the two profile tables.
pub const PROFILE_LAMBDAS: [&str; 2] = ["1/4", "3/4"];
pub const DRBF_PROFILE_N: usize = 12;
pub const IRBF_PROFILE_N: usize = 10;

pub const RESIDUAL_LAMBDAS: [&str; 6] = ["0", "1/4", "1/3", "1/2", "3/4", "1"];
pub const RESIDUAL_SIZES: [usize; 6] = [5, 6, 8, 10, 12, 15];
pub const RESIDUAL_SHAPE: f64 = 1.6;
pub const FIG4_LAMBDA: &str = "2/3";

/// Spacing of the dense figure profiles.
pub const FIGURE_STEP: f64 = 0.05;

/// η = 0, 0.1, ..., 1.5.
pub fn drbf_profile_etas() -> Vec<f64> {
    (0..=15).map(|i| i as f64 / 10.0).collect()
}

/// η = 0, 0.1, ..., 1.5 then 2, 2.5, ..., 4.5.
pub fn irbf_profile_etas() -> Vec<f64> {
    let mut e = drbf_profile_etas();
    e.extend((4..=9).map(|i| i as f64 / 2.0));
    e
}

pub fn slope_row(rows: &[SlopeRow], lam: &str) -> SlopeRow {
    *rows.iter().find(|r| r.lam == lam).expect("lambda listed in reference rows")
}
