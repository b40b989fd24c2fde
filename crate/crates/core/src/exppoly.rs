//! Symbolic exponential polynomials `f(z) = Σ P_j(z)·e^{Q_j(z)}` and their
//! normalized form `f = Σ H_j(z)·e^{w_j z^q}`.
//!
//! Conventions:
//! * every exponent satisfies `Q_j(0) = 0` (constants are folded into `P_j`),
//! * the exponents are pairwise distinct as coefficient lists,
//! * an empty term list is the zero function.

use crate::error::{Error, Result};
use crate::poly::Poly;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One summand `P(z)·e^{Q(z)}` with `P ≢ 0` and `Q(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    coeff: Poly,
    exponent: Poly,
}

impl ExpTerm {
    /// Builds a term, folding `e^{Q(0)}` into the coefficient so the stored
    /// exponent vanishes at the origin. Returns `None` when the coefficient
    /// is (or becomes) identically zero.
    pub fn new(coeff: Poly, exponent: Poly) -> Option<ExpTerm> {
        let mut exponent = exponent;
        let c0 = exponent.take_constant_term();
        let coeff = if c0 == ZERO {
            coeff
        } else {
            &coeff * &Poly::constant(c0.exp())
        };
        if coeff.is_zero() {
            None
        } else {
            Some(ExpTerm { coeff, exponent })
        }
    }

    pub fn coeff(&self) -> &Poly {
        &self.coeff
    }

    pub fn exponent(&self) -> &Poly {
        &self.exponent
    }
}

/// A finite sum of [`ExpTerm`]s with pairwise distinct exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    terms: Vec<ExpTerm>,
}

impl ExpPoly {
    /// The zero function.
    pub fn zero() -> ExpPoly {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: Complex64) -> ExpPoly {
        ExpPoly::from_pairs(vec![(Poly::constant(c), Poly::zero())])
    }

    /// Assembles a sum from `(P, Q)` pairs: exponents are normalized to
    /// `Q(0) = 0`, like exponents are merged by adding their coefficients,
    /// and terms whose coefficient cancels to zero are dropped.
    pub fn from_pairs(pairs: Vec<(Poly, Poly)>) -> ExpPoly {
        let mut merged: Vec<(Poly, Poly)> = Vec::new();
        for (coeff, exponent) in pairs {
            let Some(term) = ExpTerm::new(coeff, exponent) else {
                continue;
            };
            match merged.iter_mut().find(|(_, q)| *q == term.exponent) {
                Some((p, _)) => *p = &*p + &term.coeff,
                None => merged.push((term.coeff, term.exponent)),
            }
        }
        let mut terms: Vec<ExpTerm> = merged
            .into_iter()
            .filter(|(p, _)| !p.is_zero())
            .map(|(coeff, exponent)| ExpTerm { coeff, exponent })
            .collect();
        // Canonical term order: makes equality representation-independent
        // and printing deterministic.
        terms.sort_by(|a, b| a.exponent.lex_cmp(&b.exponent));
        ExpPoly { terms }
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max degree of the exponents; 0 when every exponent is constant
    /// (i.e. the function is a plain polynomial).
    pub fn order(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|t| t.exponent.degree())
            .max()
            .unwrap_or(0)
    }

    /// Termwise product rule: `(P e^Q)' = (P' + Q'·P) e^Q`. The exponents
    /// survive differentiation; terms whose new coefficient vanishes
    /// identically are dropped.
    pub fn derivative(&self) -> ExpPoly {
        let pairs = self
            .terms
            .iter()
            .map(|t| {
                let r = &t.coeff.derivative() + &(&t.exponent.derivative() * &t.coeff);
                (r, t.exponent.clone())
            })
            .collect();
        ExpPoly::from_pairs(pairs)
    }

    /// The function `z ↦ f(a·z)` as a symbolic object.
    pub fn scale_argument(&self, a: Complex64) -> ExpPoly {
        let pairs = self
            .terms
            .iter()
            .map(|t| (t.coeff.scale_argument(a), t.exponent.scale_argument(a)))
            .collect();
        ExpPoly::from_pairs(pairs)
    }

    pub fn add(&self, rhs: &ExpPoly) -> ExpPoly {
        let pairs = self
            .terms
            .iter()
            .chain(rhs.terms.iter())
            .map(|t| (t.coeff.clone(), t.exponent.clone()))
            .collect();
        ExpPoly::from_pairs(pairs)
    }

    /// Distributes the product: exponents of crossed terms add, like
    /// exponents merge.
    pub fn mul(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut pairs = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                pairs.push((&a.coeff * &b.coeff, &a.exponent + &b.exponent));
            }
        }
        ExpPoly::from_pairs(pairs)
    }

    pub fn neg(&self) -> ExpPoly {
        let pairs = self
            .terms
            .iter()
            .map(|t| (-&t.coeff, t.exponent.clone()))
            .collect();
        ExpPoly::from_pairs(pairs)
    }

    /// `f^n` by binary exponentiation; `f^0 = 1`.
    pub fn pow(&self, n: u32) -> ExpPoly {
        let mut acc = ExpPoly::constant(Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Groups terms by the coefficient `w` of `z^q` in their exponent
    /// (`q` = order of `f`). Terms with `deg Q < q` land in the `w = 0`
    /// group. Fails when `q = 0`: a plain polynomial has no leading
    /// coefficients to group by.
    pub fn normalize(&self) -> Result<NormalizedForm> {
        let order = self.order();
        if self.terms.is_empty() || order == 0 {
            return Err(Error::NotExponentialOfPositiveOrder);
        }
        let mut groups: Vec<(Complex64, Vec<(Poly, Poly)>)> = Vec::new();
        for t in &self.terms {
            let w = t.exponent.coeff(order);
            let reduced = &t.exponent - &Poly::monomial(w, order);
            let entry = (t.coeff.clone(), reduced);
            match groups.iter_mut().find(|(g, _)| *g == w) {
                Some((_, v)) => v.push(entry),
                None => groups.push((w, vec![entry])),
            }
        }
        // Deterministic entry order regardless of input term order.
        groups.sort_by(|a, b| {
            (a.0.re, a.0.im)
                .partial_cmp(&(b.0.re, b.0.im))
                .expect("leading coefficients are finite")
        });
        let entries: Vec<LeadingEntry> = groups
            .into_iter()
            .map(|(w, pairs)| LeadingEntry {
                leading: w,
                coefficient: ExpPoly::from_pairs(pairs),
            })
            .collect();
        let max_coeff_order = entries.iter().map(|e| e.coefficient.order()).max().unwrap_or(0);
        let has_zero_leading = entries.iter().any(|e| e.leading == ZERO);
        Ok(NormalizedForm {
            order,
            gap: order - max_coeff_order,
            entries,
            has_zero_leading,
        })
    }
}

/// One group `H(z)·e^{w z^q}` of the normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingEntry {
    /// Coefficient `w` of `z^q` in the original exponents of the group.
    pub leading: Complex64,
    /// The regrouped coefficient `H`, itself an exponential polynomial of
    /// order at most `q - 1`.
    pub coefficient: ExpPoly,
}

/// `f = Σ H_j(z)·e^{w_j z^q}` with pairwise distinct `w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedForm {
    /// `q`, the max degree among the original exponents.
    pub order: usize,
    /// `p = q - max_j order(H_j)`, in `1..=q`. Strips shrink like
    /// `log r / r^p`; error terms scale like `r^{q-p}`.
    pub gap: usize,
    pub entries: Vec<LeadingEntry>,
    /// Whether some `w_j = 0`, i.e. the `H_0` group of sub-maximal exponents
    /// is nonempty.
    pub has_zero_leading: bool,
}

impl NormalizedForm {
    /// The leading coefficients `w_j` in entry order.
    pub fn leadings(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.leading).collect()
    }

    /// The conjugated leading coefficients (the point set whose hull drives
    /// the geometry).
    pub fn conjugated_leadings(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.leading.conj()).collect()
    }

    /// Flattens back to a plain term list: each `H_j e^{w_j z^q}` expands to
    /// `Σ P e^{Q + w_j z^q}`.
    pub fn expand(&self) -> ExpPoly {
        let mut pairs = Vec::new();
        for entry in &self.entries {
            let lead = Poly::monomial(entry.leading, self.order);
            if entry.coefficient.is_zero() {
                continue;
            }
            for t in entry.coefficient.terms() {
                pairs.push((t.coeff().clone(), t.exponent() + &lead));
            }
        }
        ExpPoly::from_pairs(pairs)
    }
}
