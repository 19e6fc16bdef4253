//! Formula syntax tree and structural transforms.

use std::fmt;

use nalgebra::DVector;

use crate::geometry::HPolytope;

use super::StlError;

/// Closed time interval `[start, end]` attached to a temporal operator, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Result<Self, StlError> {
        if !(start.is_finite() && end.is_finite()) || start < 0.0 || start > end {
            return Err(StlError::BadInterval { t1: start, t2: end });
        }
        Ok(TimeInterval { start, end })
    }

    /// Width `end - start` in seconds.
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// Atomic predicate over one system's position.
///
/// The quantitative value of `Affine` is `a . pos + b` in meters. The region
/// macros evaluate to the min (inside) or max (outside) of the per-face
/// margins of an H-polytope, which is exactly the robustness of the
/// conjunction or disjunction they expand to.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Affine { system: String, a: DVector<f64>, b: f64 },
    Inside { system: String, region: String, poly: HPolytope },
    Outside { system: String, region: String, poly: HPolytope },
}

impl Predicate {
    pub fn affine(system: impl Into<String>, a: DVector<f64>, b: f64) -> Result<Self, StlError> {
        if a.iter().all(|c| *c == 0.0) {
            return Err(StlError::ZeroCoefficients);
        }
        Ok(Predicate::Affine { system: system.into(), a, b })
    }

    /// Name of the system this predicate constrains.
    pub fn system(&self) -> &str {
        match self {
            Predicate::Affine { system, .. }
            | Predicate::Inside { system, .. }
            | Predicate::Outside { system, .. } => system,
        }
    }

    /// Lossless expansion of the region macros into affine predicates.
    ///
    /// `inside` becomes a conjunction of per-face margins `b_i - h_i . pos`,
    /// `outside` a disjunction of `h_i . pos - b_i`; an affine predicate
    /// expands to itself.
    pub fn expand(&self) -> Formula {
        match self {
            Predicate::Affine { .. } => Formula::Pred(self.clone()),
            Predicate::Inside { system, poly, .. } => {
                Formula::And(face_predicates(system, poly, true))
            }
            Predicate::Outside { system, poly, .. } => {
                Formula::Or(face_predicates(system, poly, false))
            }
        }
    }

    /// Predicate-level negation: flips the affine sign, swaps inside/outside.
    pub fn negate(&self) -> Predicate {
        match self {
            Predicate::Affine { system, a, b } => {
                Predicate::Affine { system: system.clone(), a: -a, b: -*b }
            }
            Predicate::Inside { system, region, poly } => Predicate::Outside {
                system: system.clone(),
                region: region.clone(),
                poly: poly.clone(),
            },
            Predicate::Outside { system, region, poly } => Predicate::Inside {
                system: system.clone(),
                region: region.clone(),
                poly: poly.clone(),
            },
        }
    }
}

fn face_predicates(system: &str, poly: &HPolytope, inside: bool) -> Vec<Formula> {
    (0..poly.faces())
        .map(|i| {
            let row = poly.h().row(i).transpose();
            let (a, b) = if inside {
                // b_i - h_i . x >= 0 inside face i
                (-row, poly.b()[i])
            } else {
                (row.clone_owned(), -poly.b()[i])
            };
            Formula::Pred(Predicate::Affine { system: system.to_string(), a, b })
        })
        .collect()
}

/// Formula syntax tree.
///
/// `Eventually` and `Always` are kept as first-class nodes rather than
/// `Until` sugar so the monitor and the MILP encoder can treat them with the
/// cheaper windowed min/max forms.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Pred(Predicate),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Until(TimeInterval, Box<Formula>, Box<Formula>),
    Eventually(TimeInterval, Box<Formula>),
    Always(TimeInterval, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(children: Vec<Formula>) -> Result<Formula, StlError> {
        if children.is_empty() {
            return Err(StlError::EmptyConnective("conjunction"));
        }
        Ok(Formula::And(children))
    }

    pub fn or(children: Vec<Formula>) -> Result<Formula, StlError> {
        if children.is_empty() {
            return Err(StlError::EmptyConnective("disjunction"));
        }
        Ok(Formula::Or(children))
    }

    pub fn until(i: TimeInterval, lhs: Formula, rhs: Formula) -> Formula {
        Formula::Until(i, Box::new(lhs), Box::new(rhs))
    }

    pub fn eventually(i: TimeInterval, f: Formula) -> Formula {
        Formula::Eventually(i, Box::new(f))
    }

    pub fn always(i: TimeInterval, f: Formula) -> Formula {
        Formula::Always(i, Box::new(f))
    }

    /// How far past the evaluation instant the formula looks, in seconds.
    pub fn horizon(&self) -> f64 {
        match self {
            Formula::Pred(_) => 0.0,
            Formula::Not(f) => f.horizon(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(|f| f.horizon()).fold(0.0, f64::max)
            }
            Formula::Until(i, l, r) => i.end + l.horizon().max(r.horizon()),
            Formula::Eventually(i, f) | Formula::Always(i, f) => i.end + f.horizon(),
        }
    }

    /// Systems referenced anywhere in the formula, sorted and deduplicated.
    pub fn systems(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_systems(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_systems(&self, out: &mut Vec<String>) {
        match self {
            Formula::Pred(p) => out.push(p.system().to_string()),
            Formula::Not(f) | Formula::Eventually(_, f) | Formula::Always(_, f) => {
                f.collect_systems(out)
            }
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_systems(out);
                }
            }
            Formula::Until(_, l, r) => {
                l.collect_systems(out);
                r.collect_systems(out);
            }
        }
    }

    /// Negation normal form: negations pushed onto predicates.
    ///
    /// `!(a U b)` has no dual in this grammar and is kept as an outer
    /// negation; the monitor handles it, the MILP encoder rejects it.
    pub fn nnf(&self) -> Formula {
        match self {
            Formula::Pred(_) => self.clone(),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.nnf()).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.nnf()).collect()),
            Formula::Until(i, l, r) => Formula::until(*i, l.nnf(), r.nnf()),
            Formula::Eventually(i, f) => Formula::eventually(*i, f.nnf()),
            Formula::Always(i, f) => Formula::always(*i, f.nnf()),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Pred(p) => Formula::Pred(p.negate()),
                Formula::Not(f) => f.nnf(),
                Formula::And(fs) => {
                    Formula::Or(fs.iter().map(|f| Formula::not(f.clone()).nnf()).collect())
                }
                Formula::Or(fs) => {
                    Formula::And(fs.iter().map(|f| Formula::not(f.clone()).nnf()).collect())
                }
                Formula::Eventually(i, f) => Formula::always(*i, Formula::not((**f).clone()).nnf()),
                Formula::Always(i, f) => {
                    Formula::eventually(*i, Formula::not((**f).clone()).nnf())
                }
                Formula::Until(i, l, r) => {
                    Formula::not(Formula::until(*i, l.nnf(), r.nnf()))
                }
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Pred(_) => 4,
            Formula::Not(_) | Formula::Eventually(..) | Formula::Always(..) => 3,
            Formula::Until(..) => 2,
            Formula::And(_) => 1,
            Formula::Or(_) => 0,
        }
    }

    fn fmt_child(&self, child: &Formula, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < min_prec {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

fn fmt_affine(system: &str, a: &DVector<f64>, b: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    const COORDS: [&str; 2] = ["x", "y"];
    let mut first = true;
    for (i, &c) in a.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let coord = COORDS.get(i).copied().unwrap_or("?");
        if first {
            if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
        } else if c < 0.0 {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        write!(f, "{}*{}({})", c.abs(), coord, system)?;
    }
    if b != 0.0 {
        if b < 0.0 {
            write!(f, " - {}", -b)?;
        } else {
            write!(f, " + {b}")?;
        }
    }
    write!(f, " >= 0")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Pred(Predicate::Affine { system, a, b }) => fmt_affine(system, a, *b, f),
            Formula::Pred(Predicate::Inside { system, region, .. }) => {
                write!(f, "inside({system}, {region})")
            }
            Formula::Pred(Predicate::Outside { system, region, .. }) => {
                write!(f, "outside({system}, {region})")
            }
            Formula::Not(c) => {
                write!(f, "!")?;
                self.fmt_child(c, 3, f)
            }
            Formula::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    self.fmt_child(c, 2, f)?;
                }
                Ok(())
            }
            Formula::Or(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    self.fmt_child(c, 1, f)?;
                }
                Ok(())
            }
            Formula::Until(i, l, r) => {
                self.fmt_child(l, 3, f)?;
                write!(f, " U{i} ")?;
                self.fmt_child(r, 3, f)
            }
            Formula::Eventually(i, c) => {
                write!(f, "F{i} ")?;
                self.fmt_child(c, 3, f)
            }
            Formula::Always(i, c) => {
                write!(f, "G{i} ")?;
                self.fmt_child(c, 3, f)
            }
        }
    }
}
