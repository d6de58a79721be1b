//! Named families of groups.

use num_integer::Integer;

use super::{Presentation, PresentationError, SplittingSpec};
use crate::words::Word;

/// The built-in families. `G`, `H`, `K` and `N` use the alphabets
/// `{a, b, c}`, `{a, s, t}`, `{a, s, t}` and `{a, b, c}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Free(usize),
    OrientableSurface(usize),
    NonOrientableSurface(usize),
    /// `B(n, m) = ⟨x, y | y xⁿ y⁻¹ = xᵐ⟩`.
    BaumslagSolitar(i64, i64),
    /// `⟨a, b, c | a = [cⁱ, a][cʲ, b]⟩`.
    G(i64, i64),
    /// `⟨a, s, t | a = [aⁱ, tʲ][s, t]⟩`.
    H(i64, i64),
    /// `⟨a, s, t | aⁱ[s, a] = tʲ⟩`, an amalgam of `⟨a, s⟩` and `⟨t⟩`.
    K(i64, i64),
    /// `⟨a, b, c | aᵖ b^q cʳ⟩`, an amalgam of `⟨a, b⟩` and `⟨c⟩`.
    N(i64, i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub presentation: Presentation,
    pub splitting: Option<SplittingSpec>,
}

fn bad(msg: impl Into<String>) -> PresentationError {
    PresentationError::FamilyConstraint(msg.into())
}

fn nat(params: &[i64], i: usize) -> Result<usize, PresentationError> {
    usize::try_from(params[i]).map_err(|_| bad("parameter must be non-negative"))
}

impl Family {
    /// Looks a family up by name: `free n`, `surface g`, `nonorientable g`,
    /// `bs n m`, `G i j`, `H i j`, `K i j`, `N p q r`.
    pub fn from_name(name: &str, params: &[i64]) -> Result<Self, PresentationError> {
        let arity = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(bad(format!("{name} expects {k} parameters, got {}", params.len())))
            }
        };
        let fam = match name {
            "free" | "F" => {
                arity(1)?;
                Family::Free(nat(params, 0)?)
            }
            "surface" | "orientable" => {
                arity(1)?;
                Family::OrientableSurface(nat(params, 0)?)
            }
            "nonorientable" => {
                arity(1)?;
                Family::NonOrientableSurface(nat(params, 0)?)
            }
            "bs" | "B" => {
                arity(2)?;
                Family::BaumslagSolitar(params[0], params[1])
            }
            "G" => {
                arity(2)?;
                Family::G(params[0], params[1])
            }
            "H" => {
                arity(2)?;
                Family::H(params[0], params[1])
            }
            "K" => {
                arity(2)?;
                Family::K(params[0], params[1])
            }
            "N" => {
                arity(3)?;
                Family::N(params[0], params[1], params[2])
            }
            other => return Err(bad(format!("unknown family {other:?}"))),
        };
        Ok(fam)
    }

    pub fn label(&self) -> String {
        match *self {
            Family::Free(n) => format!("F{n}"),
            Family::OrientableSurface(g) => format!("Sigma{g}"),
            Family::NonOrientableSurface(g) => format!("S{g}"),
            Family::BaumslagSolitar(n, m) => format!("B({n},{m})"),
            Family::G(i, j) => format!("G({i},{j})"),
            Family::H(i, j) => format!("H({i},{j})"),
            Family::K(i, j) => format!("K({i},{j})"),
            Family::N(p, q, r) => format!("N({p},{q},{r})"),
        }
    }

    pub fn build(&self) -> Result<FamilyInstance, PresentationError> {
        let label = self.label();
        let plain = |p: Presentation| FamilyInstance { presentation: p.with_label(label.clone()), splitting: None };
        match *self {
            Family::Free(n) => {
                let names = (1..=n).map(|i| format!("x{i}")).collect();
                Ok(plain(Presentation::free(names)?))
            }
            Family::OrientableSurface(g) => {
                let mut names: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
                names.extend((1..=g).map(|i| format!("y{i}")));
                let rank = 2 * g;
                let mut r = Word::identity(rank);
                for i in 0..g {
                    let c = Word::commutator(&Word::generator(i, rank), &Word::generator(g + i, rank));
                    r = &r * &c;
                }
                let relators = if g == 0 { vec![] } else { vec![r] };
                Ok(plain(Presentation::new(names, relators, "")?))
            }
            Family::NonOrientableSurface(g) => {
                if g == 0 {
                    return Err(bad("non-orientable genus must be at least 1"));
                }
                let names: Vec<String> = (0..=g).map(|i| format!("x{i}")).collect();
                let rank = g + 1;
                let raw: Vec<i64> = (1..=rank as i64).flat_map(|k| [k, k]).collect();
                let r = Word::from_signed(&raw, rank)?;
                Ok(plain(Presentation::new(names, vec![r], "")?))
            }
            Family::BaumslagSolitar(n, m) => {
                if n == 0 || m == 0 {
                    return Err(bad("B(n, m) needs non-zero n and m"));
                }
                let base = Presentation::free(vec!["x"])?.with_label("Z");
                let x = base.generator(0);
                let spec = SplittingSpec::hnn(base, x.pow(n), x.pow(m), "y")?;
                let presentation = spec.realize().presentation.with_label(label);
                Ok(FamilyInstance { presentation, splitting: Some(spec) })
            }
            Family::G(i, j) => {
                if i <= 0 || j <= 0 {
                    return Err(bad("G(i, j) needs positive i and j"));
                }
                let p = Presentation::free(vec!["a", "b", "c"])?;
                let (a, b, c) = (p.generator(0), p.generator(1), p.generator(2));
                let rhs = &Word::commutator(&c.pow(i), &a) * &Word::commutator(&c.pow(j), &b);
                let r = &a * &rhs.inverse();
                Ok(plain(Presentation::new(vec!["a", "b", "c"], vec![r], "")?))
            }
            Family::H(i, j) => {
                if i <= 0 || j <= 0 {
                    return Err(bad("H(i, j) needs positive i and j"));
                }
                let p = Presentation::free(vec!["a", "s", "t"])?;
                let (a, s, t) = (p.generator(0), p.generator(1), p.generator(2));
                let rhs = &Word::commutator(&a.pow(i), &t.pow(j)) * &Word::commutator(&s, &t);
                let r = &a * &rhs.inverse();
                Ok(plain(Presentation::new(vec!["a", "s", "t"], vec![r], "")?))
            }
            Family::K(i, j) => {
                if i == 0 || j == 0 || i.gcd(&j) != 1 {
                    return Err(bad(format!("K(i, j) needs non-zero coprime i, j; got ({i}, {j})")));
                }
                let left = Presentation::free(vec!["a", "s"])?.with_label("F2");
                let right = Presentation::free(vec!["t"])?.with_label("Z");
                let (a, s) = (left.generator(0), left.generator(1));
                let u = &a.pow(i) * &Word::commutator(&s, &a);
                let v = right.generator(0).pow(j);
                let spec = SplittingSpec::amalgam(left, right, u, v)?;
                let presentation = spec.realize().presentation.with_label(label);
                Ok(FamilyInstance { presentation, splitting: Some(spec) })
            }
            Family::N(p, q, r) => {
                if p == 0 || q == 0 || r == 0 || p.gcd(&q).gcd(&r) != 1 {
                    return Err(bad(format!("N(p, q, r) needs non-zero entries with gcd 1; got ({p}, {q}, {r})")));
                }
                let left = Presentation::free(vec!["a", "b"])?.with_label("F2");
                let right = Presentation::free(vec!["c"])?.with_label("Z");
                let u = &left.generator(0).pow(p) * &left.generator(1).pow(q);
                let v = right.generator(0).pow(-r);
                let spec = SplittingSpec::amalgam(left, right, u, v)?;
                let presentation = spec.realize().presentation.with_label(label);
                Ok(FamilyInstance { presentation, splitting: Some(spec) })
            }
        }
    }
}
