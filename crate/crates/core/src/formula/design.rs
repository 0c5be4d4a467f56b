use nalgebra::{DMatrix, DVector};

use super::parse::{Term, TermList, GROUP};
use super::FormulaError;
use crate::scheme::GroupingScheme;
use crate::tabular::{ColumnData, Dataset};

/// Relative size below which a column's residual (after projecting out the
/// columns kept so far) marks it as aliased.
pub const ALIAS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub x: DMatrix<f64>,
    pub labels: Vec<String>,
    /// Indices of linearly independent columns, ascending.
    pub kept: Vec<usize>,
}

impl DesignMatrix {
    /// Wraps a raw matrix, running the same aliasing pass as [`build_design`].
    pub fn from_matrix(x: DMatrix<f64>, labels: Vec<String>) -> Self {
        let kept = independent_columns(&x);
        DesignMatrix { x, labels, kept }
    }

    /// Number of estimable coefficients.
    pub fn rank(&self) -> usize {
        self.kept.len()
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_aliased(&self, col: usize) -> bool {
        self.kept.binary_search(&col).is_err()
    }

    pub fn kept_matrix(&self) -> DMatrix<f64> {
        self.x.select_columns(&self.kept)
    }
}

enum Coded {
    Numeric(Vec<f64>),
    Factor { levels: Vec<String>, codes: Vec<usize> },
}

fn lookup(name: &str, data: &Dataset, scheme: Option<&GroupingScheme>) -> Result<Coded, FormulaError> {
    if name == GROUP {
        let scheme = scheme.ok_or(FormulaError::GroupWithoutScheme)?;
        let f = data.factor(scheme.factor())?;
        if f.levels() != scheme.levels() {
            return Err(FormulaError::DegenerateDesign(format!(
                "scheme levels do not match the levels of '{}'",
                scheme.factor()
            )));
        }
        let codes = f.codes().iter().map(|&c| usize::from(scheme.in_other(c))).collect();
        return Ok(Coded::Factor { levels: vec![scheme.reference_label(), scheme.other_label()], codes });
    }
    let col = data.require(name)?;
    Ok(match col.data() {
        ColumnData::Numeric(v) => Coded::Numeric(v.clone()),
        ColumnData::Factor(f) => Coded::Factor { levels: f.levels().to_vec(), codes: f.codes().to_vec() },
    })
}

/// Columns of one variable within a term: treatment contrasts (first level as
/// reference) when `contrasts`, otherwise one indicator per level.
fn columns(name: &str, coded: &Coded, contrasts: bool) -> Vec<(String, Vec<f64>)> {
    match coded {
        Coded::Numeric(v) => vec![(name.to_string(), v.clone())],
        Coded::Factor { levels, codes } => levels
            .iter()
            .enumerate()
            .skip(usize::from(contrasts))
            .map(|(l, label)| {
                (format!("{name}{label}"), codes.iter().map(|&c| if c == l { 1.0 } else { 0.0 }).collect())
            })
            .collect(),
    }
}

/// Builds the model matrix for `terms`, substituting `scheme` for `group`.
///
/// A factor inside a term is contrast-coded when the term with that factor
/// removed is also in the model (the intercept standing in for the empty
/// term), and indicator-coded otherwise.
pub fn build_design(
    data: &Dataset,
    terms: &TermList,
    scheme: Option<&GroupingScheme>,
) -> Result<DesignMatrix, FormulaError> {
    if terms.response != data.response_name() {
        return Err(FormulaError::ResponseMismatch {
            formula: terms.response.clone(),
            data: data.response_name().to_string(),
        });
    }
    let n = data.n_rows();
    let mut labels = vec!["(Intercept)".to_string()];
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];

    for term in &terms.terms {
        let vars = term.vars();
        let coded: Vec<Coded> = vars.iter().map(|v| lookup(v, data, scheme)).collect::<Result<_, _>>()?;
        let margin_present = |drop: usize| -> bool {
            match term {
                Term::Main(_) => terms.intercept,
                Term::Interaction(..) => terms.contains(&Term::Main(vars[1 - drop].to_string())),
            }
        };
        let per_var: Vec<Vec<(String, Vec<f64>)>> =
            (0..vars.len()).map(|i| columns(vars[i], &coded[i], margin_present(i))).collect();
        match per_var.as_slice() {
            [a] => {
                for (l, c) in a {
                    labels.push(l.clone());
                    cols.push(c.clone());
                }
            }
            [a, b] => {
                for (lb, cb) in b {
                    for (la, ca) in a {
                        labels.push(format!("{la}:{lb}"));
                        cols.push(ca.iter().zip(cb).map(|(x, y)| x * y).collect());
                    }
                }
            }
            _ => unreachable!("terms have one or two variables"),
        }
    }

    let x = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    Ok(DesignMatrix::from_matrix(x, labels))
}

/// Sequential Householder pass: a column is aliased when its component
/// orthogonal to the previously kept columns is at most `ALIAS_TOL` times its
/// own norm. Kept columns retain their original order.
fn independent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let n = x.nrows();
    let mut reflectors: Vec<(usize, DVector<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    for j in 0..x.ncols() {
        let k = reflectors.len();
        if k == n {
            break;
        }
        let mut v: DVector<f64> = x.column(j).into_owned();
        let norm0 = v.norm();
        for (start, h, beta) in &reflectors {
            let s = h.rows(*start, n - start).dot(&v.rows(*start, n - start));
            let scaled = h.rows(*start, n - start) * (beta * s);
            let mut tail = v.rows_mut(*start, n - start);
            tail -= scaled;
        }
        let tail = v.rows(k, n - k).norm();
        if norm0 == 0.0 || tail <= ALIAS_TOL * norm0 {
            continue;
        }
        let alpha = if v[k] >= 0.0 { -tail } else { tail };
        let mut h = DVector::zeros(n);
        h.rows_mut(k, n - k).copy_from(&v.rows(k, n - k));
        h[k] -= alpha;
        let beta = 2.0 / h.norm_squared();
        reflectors.push((k, h, beta));
        kept.push(j);
    }
    kept
}
