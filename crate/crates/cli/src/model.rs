//! Plain-text classifier files.
//!
//! ```text
//! advrobust-classifier 1
//! kind linear
//! dim 3
//! weights 1.0e0 -2.5e-1 0.0e0
//! intercept -1.0e0
//! ```
//!
//! Quadratic files replace `weights`/`intercept` with `matrix` followed by
//! `dim` rows. Kernel files carry `kernel poly <q>` or `kernel rbf <σ²>`,
//! `intercept`, `support <n>` and then `n` rows `coefficient x1 … xd`.
//! Numbers are written with 17 significant digits so files round-trip.

use std::fmt::Write as _;
use std::path::Path;

use advrobust_core::classifiers::{
    Classifier, KernelClassifier, KernelSpec, LinearClassifier, QuadraticClassifier,
};
use advrobust_core::numerics::SymMatrix;

use crate::error::{CliError, Result};

const MAGIC: &str = "advrobust-classifier 1";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

pub fn to_text(c: &Classifier) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "kind {}", c.kind());
    let _ = writeln!(s, "dim {}", c.dim());
    match c {
        Classifier::Linear(l) => {
            let _ = writeln!(s, "weights {}", row(l.weights()));
            let _ = writeln!(s, "intercept {}", num(l.intercept()));
        }
        Classifier::Quadratic(q) => {
            let _ = writeln!(s, "matrix");
            for i in 0..q.dim() {
                let _ = writeln!(s, "{}", row(q.matrix().row(i)));
            }
        }
        Classifier::Kernel(k) => {
            match k.kernel() {
                KernelSpec::Polynomial { degree } => {
                    let _ = writeln!(s, "kernel poly {degree}");
                }
                KernelSpec::Rbf { sigma2 } => {
                    let _ = writeln!(s, "kernel rbf {}", num(sigma2));
                }
            }
            let _ = writeln!(s, "intercept {}", num(k.intercept()));
            let _ = writeln!(s, "support {}", k.support_points().len());
            for (x, a) in k.support_points().iter().zip(k.coefficients()) {
                let _ = writeln!(s, "{} {}", num(*a), row(x));
            }
        }
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Data(format!("model line {}: {msg}", self.line))
    }

    fn next(&mut self) -> Result<&'a str> {
        loop {
            let (i, l) = self
                .inner
                .next()
                .ok_or_else(|| CliError::Data("model file ends early".into()))?;
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() && !l.starts_with('#') {
                return Ok(l);
            }
        }
    }

    /// Next line, which must start with `key`; returns the rest.
    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next()?;
        match l.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            None if l == key => Ok(""),
            _ => Err(self.err(format!("expected `{key}`"))),
        }
    }

    fn numbers(&self, s: &str) -> Result<Vec<f64>> {
        s.split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| self.err(format!("{t:?} is not a number")))
            })
            .collect()
    }

    fn scalar<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("{s:?} is not valid here")))
    }

    fn keyed_scalar<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let s = self.keyed(key)?;
        self.scalar(s)
    }

    fn next_numbers(&mut self) -> Result<Vec<f64>> {
        let s = self.next()?;
        self.numbers(s)
    }
}

pub fn from_text(text: &str) -> Result<Classifier> {
    let mut ls = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if ls.next()? != MAGIC {
        return Err(ls.err("not a classifier file"));
    }
    let kind = ls.keyed("kind")?.to_string();
    let dim: usize = {
        let v = ls.keyed("dim")?;
        ls.scalar(v)?
    };
    let expect_len = |ls: &Lines, v: &[f64], n: usize| {
        if v.len() == n {
            Ok(())
        } else {
            Err(ls.err(format!("expected {n} numbers, found {}", v.len())))
        }
    };
    let c = match kind.as_str() {
        "linear" => {
            let w = {
                let s = ls.keyed("weights")?;
                ls.numbers(s)?
            };
            expect_len(&ls, &w, dim)?;
            let b = ls.keyed_scalar("intercept")?;
            Classifier::from(LinearClassifier::new(w, b)?)
        }
        "quadratic" => {
            ls.keyed("matrix")?;
            let mut entries = Vec::with_capacity(dim * dim);
            for _ in 0..dim {
                let r = ls.next_numbers()?;
                expect_len(&ls, &r, dim)?;
                entries.extend(r);
            }
            Classifier::from(QuadraticClassifier::new(SymMatrix::from_row_major(
                dim, entries,
            )?)?)
        }
        "kernel" => {
            let spec = ls.keyed("kernel")?;
            let kernel = match spec.split_whitespace().collect::<Vec<_>>()[..] {
                ["poly", q] => KernelSpec::polynomial(ls.scalar(q)?)?,
                ["rbf", s2] => KernelSpec::rbf(ls.scalar(s2)?)?,
                _ => return Err(ls.err(format!("unknown kernel {spec:?}"))),
            };
            let b = ls.keyed_scalar("intercept")?;
            let n: usize = ls.keyed_scalar("support")?;
            let mut support = Vec::with_capacity(n);
            let mut coefficients = Vec::with_capacity(n);
            for _ in 0..n {
                let r = ls.next_numbers()?;
                expect_len(&ls, &r, dim + 1)?;
                coefficients.push(r[0]);
                support.push(r[1..].to_vec());
            }
            Classifier::from(KernelClassifier::new(
                dim,
                support,
                coefficients,
                b,
                kernel,
            )?)
        }
        other => return Err(ls.err(format!("unknown classifier kind {other:?}"))),
    };
    Ok(c)
}

pub fn save(path: &Path, c: &Classifier) -> Result<()> {
    std::fs::write(path, to_text(c)).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> Result<Classifier> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    from_text(&text).map_err(|e| e.context(&path.display().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use advrobust_core::classifiers::{f_lin_reference, f_quad_reference};

    fn round_trip(c: Classifier) {
        let back = from_text(&to_text(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn all_kinds_round_trip() {
        round_trip(f_lin_reference(9).unwrap().into());
        round_trip(
            LinearClassifier::new(vec![0.1, -1.0 / 3.0], 1e-300)
                .unwrap()
                .into(),
        );
        round_trip(f_quad_reference().into());
        let k = KernelClassifier::new(
            2,
            vec![vec![0.1, 0.7], vec![-1.0 / 7.0, 2.0]],
            vec![0.3, -0.25],
            0.0,
            KernelSpec::polynomial(2).unwrap(),
        )
        .unwrap();
        round_trip(k.into());
        let k = KernelClassifier::new(
            1,
            vec![vec![0.5]],
            vec![1.0],
            -0.5,
            KernelSpec::rbf(0.3).unwrap(),
        )
        .unwrap();
        round_trip(k.into());
    }

    #[test]
    fn malformed_files_are_data_errors() {
        for text in [
            "",
            "something else",
            "advrobust-classifier 1\nkind linear\ndim 2\nweights 1 2 3\nintercept 0",
            "advrobust-classifier 1\nkind linear\ndim 2\nweights 1 x\nintercept 0",
            "advrobust-classifier 1\nkind cubic\ndim 2",
        ] {
            let e = from_text(text).unwrap_err();
            assert_eq!(e.exit_code(), 3, "{e}");
        }
    }
}
