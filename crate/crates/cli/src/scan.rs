use ahnls::weyl::{self, Component, CoverPoint, Sheet, SphereValue, WeylMethod, WeylOptions};
use ahnls::Complex64;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::ConfigError;

/// One Weyl-function evaluation on the λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub index: usize,
    pub lambda: Complex64,
    pub sheet: Sheet,
    pub component: Option<Component>,
    pub value: Option<SphereValue>,
    pub method: Option<WeylMethod>,
    pub truncation_radius: f64,
    pub error_estimate: f64,
    /// Empty unless the evaluation failed.
    pub flag: String,
}

/// `X(y, Q)` on both sheets over every grid point, ordered by grid index then sheet.
pub fn run_scan(config: &RunConfig) -> Result<Vec<ScanRow>, ConfigError> {
    config.grid.validate()?;
    let potential = config.potential.build()?;
    let opts = WeylOptions::with_tol(config.tolerances.weyl);
    let jobs: Vec<(Complex64, Sheet)> =
        config.grid.points().into_iter().flat_map(|l| [(l, Sheet::Plus), (l, Sheet::Minus)]).collect();
    Ok(jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(lambda, sheet))| {
            let mut row = ScanRow {
                index,
                lambda,
                sheet,
                component: None,
                value: None,
                method: None,
                truncation_radius: f64::NAN,
                error_estimate: f64::NAN,
                flag: String::new(),
            };
            let result = CoverPoint::new(lambda, sheet).and_then(|q| {
                row.component = Some(q.classify());
                weyl::weyl_function(&potential, config.base_point, &q, &opts)
            });
            match result {
                Ok(v) => {
                    row.value = Some(v.value);
                    row.method = Some(v.method);
                    row.truncation_radius = v.truncation_radius;
                    row.error_estimate = v.error_estimate;
                }
                Err(e) => row.flag = e.to_string(),
            }
            row
        })
        .collect())
}
