use core::fmt;

use super::linalg::Eigenvalue;

/// Stability type of an equilibrium, read off its eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    RepellingNode,
    AttractingNode,
    Saddle,
    RepellingFocus,
    AttractingFocus,
    Center,
    Degenerate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RepellingNode => "RepellingNode",
            Self::AttractingNode => "AttractingNode",
            Self::Saddle => "Saddle",
            Self::RepellingFocus => "RepellingFocus",
            Self::AttractingFocus => "AttractingFocus",
            Self::Center => "Center",
            Self::Degenerate => "Degenerate",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative threshold below which a real part counts as zero.
pub const CLASSIFY_REL_TOL: f64 = 1e-8;

/// Classifies by the signs of the real parts, with `τ = 1e-8 · matrix_norm`.
///
/// All real parts above `τ` is repelling, all below `−τ` attracting, mixed signs
/// a saddle. A node becomes a focus when some imaginary part exceeds `τ`. A
/// purely imaginary spectrum is a center; any other real part within `τ` of
/// zero is degenerate.
pub fn classify(eigenvalues: &[Eigenvalue], matrix_norm: f64) -> Classification {
    let tau = CLASSIFY_REL_TOL * matrix_norm.abs();
    if eigenvalues.is_empty() {
        return Classification::Degenerate;
    }
    let oscillates = eigenvalues.iter().any(|e| e.im.abs() > tau);
    if eigenvalues.iter().any(|e| e.re.abs() <= tau) {
        return if oscillates && eigenvalues.iter().all(|e| e.re.abs() <= tau) {
            Classification::Center
        } else {
            Classification::Degenerate
        };
    }
    let positive = eigenvalues.iter().filter(|e| e.re > 0.0).count();
    match (positive, oscillates) {
        (p, false) if p == eigenvalues.len() => Classification::RepellingNode,
        (p, true) if p == eigenvalues.len() => Classification::RepellingFocus,
        (0, false) => Classification::AttractingNode,
        (0, true) => Classification::AttractingFocus,
        _ => Classification::Saddle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> alloc::vec::Vec<Eigenvalue> {
        v.iter().map(|&x| Eigenvalue::real(x)).collect()
    }

    #[test]
    fn sign_rules() {
        assert_eq!(classify(&real(&[-1.0, -2.0]), 2.0), Classification::AttractingNode);
        assert_eq!(classify(&real(&[5.0, -3.0]), 6.0), Classification::Saddle);
        assert_eq!(classify(&real(&[5.0, 3.0]), 6.0), Classification::RepellingNode);
        assert_eq!(classify(&real(&[1e-12, 3.0]), 3.0), Classification::Degenerate);
        assert_eq!(classify(&real(&[320.0]), 320.0), Classification::RepellingNode);
        assert_eq!(classify(&[], 1.0), Classification::Degenerate);
    }

    #[test]
    fn complex_rules() {
        let pair = |re: f64, im: f64| [Eigenvalue { re, im }, Eigenvalue { re, im: -im }];
        assert_eq!(classify(&pair(1.0, 2.0), 3.0), Classification::RepellingFocus);
        assert_eq!(classify(&pair(-1.0, 2.0), 3.0), Classification::AttractingFocus);
        assert_eq!(classify(&pair(0.0, 2.0), 3.0), Classification::Center);
    }
}
