use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::geometry::{MultiIndex, Point};
use crate::jet::{Jet, JetSpace};

/// A holomorphic polynomial f(z) = Σ c_e z^e with real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(f64, MultiIndex)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(f64, MultiIndex)>) -> Result<Self> {
        if dim == 0 {
            return Err(KernelError::InvalidParameter("polynomial dimension must be positive".into()));
        }
        for (c, e) in &terms {
            if !c.is_finite() {
                return Err(KernelError::InvalidParameter("polynomial coefficient must be finite".into()));
            }
            if e.dim() != dim {
                return Err(KernelError::DimensionMismatch { expected: dim, actual: e.dim() });
            }
        }
        Ok(Self { dim, terms })
    }

    /// The coordinate function zᵢ, `i` zero-based.
    pub fn coordinate(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(KernelError::InvalidParameter(format!("coordinate z{} out of range for dimension {dim}", i + 1)));
        }
        Self::new(dim, vec![(1.0, MultiIndex::unit(dim, i))])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(f64, MultiIndex)] {
        &self.terms
    }

    pub fn eval(&self, z: &Point) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                let mono: Complex64 = z
                    .coords()
                    .iter()
                    .zip(e.entries())
                    .map(|(zi, &k)| zi.powu(k))
                    .product();
                mono * *c
            })
            .sum()
    }

    fn jet_from_vars(&self, space: &Arc<JetSpace>, vars: &[Jet]) -> Jet {
        let mut acc = Jet::zero(space);
        for (c, e) in &self.terms {
            let mut mono = Jet::constant(space, Complex64::new(*c, 0.0));
            for (v, &k) in vars.iter().zip(e.entries()) {
                if k > 0 {
                    mono = mono.mul(&v.powi(k));
                }
            }
            acc = acc.add(&mono);
        }
        acc
    }

    /// f(z) as a jet in the holomorphic variables.
    pub(crate) fn holomorphic_jet(&self, space: &Arc<JetSpace>, zvars: &[Jet]) -> Jet {
        self.jet_from_vars(space, zvars)
    }

    /// conj(f(w)) as a jet in the w̄ variables (coefficients are real).
    pub(crate) fn antiholomorphic_jet(&self, space: &Arc<JetSpace>, wvars: &[Jet]) -> Jet {
        self.jet_from_vars(space, wvars)
    }

    /// Parses text such as `z`, `z2`, `2*z1^2 - 0.5*z1*z2 + 1`.
    /// A bare `z` means z₁.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let err = |pos: usize, msg: &str| KernelError::Syntax { pos, msg: msg.to_string() };
        let s: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < s.len() && s[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        let read_number = |pos: &mut usize| -> Option<f64> {
            let start = *pos;
            while *pos < s.len() && (s[*pos].is_ascii_digit() || s[*pos] == '.' || s[*pos] == 'e' || s[*pos] == 'E'
                || ((s[*pos] == '-' || s[*pos] == '+') && *pos > start && matches!(s[*pos - 1], 'e' | 'E')))
            {
                *pos += 1;
            }
            s[start..*pos].iter().collect::<String>().parse().ok()
        };
        let mut terms: Vec<(f64, MultiIndex)> = Vec::new();
        skip_ws(&mut pos);
        if pos == s.len() {
            return Err(err(0, "empty polynomial"));
        }
        let mut first = true;
        while pos < s.len() {
            skip_ws(&mut pos);
            let mut sign = 1.0;
            if pos < s.len() && (s[pos] == '+' || s[pos] == '-') {
                if s[pos] == '-' {
                    sign = -1.0;
                }
                pos += 1;
                skip_ws(&mut pos);
            } else if !first {
                return Err(err(pos, "expected '+' or '-'"));
            }
            first = false;
            let mut coef = sign;
            let mut exps = vec![0u32; dim];
            let mut factors = 0;
            loop {
                skip_ws(&mut pos);
                if pos >= s.len() {
                    break;
                }
                if s[pos].is_ascii_digit() || s[pos] == '.' {
                    let at = pos;
                    coef *= read_number(&mut pos).ok_or_else(|| err(at, "malformed number"))?;
                } else if s[pos] == 'z' {
                    pos += 1;
                    let start = pos;
                    while pos < s.len() && s[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let var: usize = if start == pos {
                        1
                    } else {
                        s[start..pos].iter().collect::<String>().parse().map_err(|_| err(start, "bad variable index"))?
                    };
                    if var == 0 || var > dim {
                        return Err(err(start, &format!("variable z{var} out of range for dimension {dim}")));
                    }
                    let mut power = 1u32;
                    skip_ws(&mut pos);
                    if pos < s.len() && s[pos] == '^' {
                        pos += 1;
                        skip_ws(&mut pos);
                        let st = pos;
                        while pos < s.len() && s[pos].is_ascii_digit() {
                            pos += 1;
                        }
                        power = s[st..pos].iter().collect::<String>().parse().map_err(|_| err(st, "expected exponent"))?;
                    }
                    exps[var - 1] += power;
                } else {
                    return Err(err(pos, &format!("unexpected character '{}'", s[pos])));
                }
                factors += 1;
                skip_ws(&mut pos);
                if pos < s.len() && s[pos] == '*' {
                    pos += 1;
                    continue;
                }
                break;
            }
            if factors == 0 {
                return Err(err(pos, "expected a term"));
            }
            terms.push((coef, MultiIndex::new(exps)));
        }
        Self::new(dim, terms)
    }
}

impl fmt::Display for Polynomial {
    /// DSL form: `poly(m, [c, e1, .., em], ...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poly({}", self.dim)?;
        for (c, e) in &self.terms {
            write!(f, ", [{c}")?;
            for k in e.entries() {
                write!(f, ", {k}")?;
            }
            write!(f, "]")?;
        }
        write!(f, ")")
    }
}
