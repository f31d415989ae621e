use std::fmt::Write;

/// Diagnostics of one ADMM iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// Pyramid level (0 = finest).
    pub level: usize,
    pub iter: usize,
    pub objective: f64,
    pub rel_change: f64,
    /// `‖r − x‖`
    pub res_r: f64,
    /// `‖u_ℓ − Φ_ℓᵀ x‖` per dictionary.
    pub res_u: Vec<f64>,
    /// `‖v − D x‖`
    pub res_v: f64,
    /// Milliseconds since the solve started.
    pub wall_ms: f64,
}

/// Per-iteration history of a solve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Wall time of the last record.
    pub fn wall_ms(&self) -> f64 {
        self.last().map_or(0.0, |r| r.wall_ms)
    }

    /// CSV with header `iter,objective,rel_change,res_r,res_u1,res_u2,res_v,wall_ms`.
    ///
    /// Iterations are numbered consecutively across pyramid levels; `res_u2` is empty for
    /// single-dictionary solves.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,objective,rel_change,res_r,res_u1,res_u2,res_v,wall_ms\n");
        for (k, r) in self.records.iter().enumerate() {
            let u = |i: usize| r.res_u.get(i).map(|v| format!("{v:.9e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{:.12e},{:.9e},{:.9e},{},{},{:.9e},{:.3}",
                k + 1,
                r.objective,
                r.rel_change,
                r.res_r,
                u(0),
                u(1),
                r.res_v,
                r.wall_ms
            );
        }
        s
    }
}
