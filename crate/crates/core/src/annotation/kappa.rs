use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KappaError {
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("at least one label pair is required")]
    Empty,
    #[error("chance agreement is 1 but observed agreement is not")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AgreementLabel {
    TotallyAgree,
    FairAgree,
    Disagree,
}

impl AgreementLabel {
    /// Both agree labels count as agreement.
    pub fn binarize(self) -> bool {
        !matches!(self, AgreementLabel::Disagree)
    }
}

/// Cohen's kappa for two binary raters.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<f64, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(KappaError::Empty);
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let a_true = a.iter().filter(|x| **x).count() as f64;
    let b_true = b.iter().filter(|x| **x).count() as f64;
    let p_o = agree / n;
    let p_e = (a_true / n) * (b_true / n) + (1.0 - a_true / n) * (1.0 - b_true / n);
    if p_e == 1.0 {
        return if p_o == 1.0 {
            Ok(1.0)
        } else {
            Err(KappaError::Degenerate)
        };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Kappa over three-way agreement labels after binarization.
pub fn cohen_kappa_labels(a: &[AgreementLabel], b: &[AgreementLabel]) -> Result<f64, KappaError> {
    let bin = |l: &[AgreementLabel]| l.iter().map(|x| x.binarize()).collect::<Vec<_>>();
    cohen_kappa(&bin(a), &bin(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use AgreementLabel::*;

    #[test]
    fn reference_cases() {
        let (t, f) = (true, false);
        assert_eq!(cohen_kappa(&[t, f, t], &[t, f, t]).unwrap(), 1.0);
        assert!((cohen_kappa(&[t, t, f, f], &[t, f, t, f]).unwrap()).abs() < 1e-9);
        assert!((cohen_kappa(&[t, t, t, f], &[t, t, f, f]).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_and_invalid() {
        assert_eq!(cohen_kappa(&[true, true], &[true, true]).unwrap(), 1.0);
        assert_eq!(
            cohen_kappa(&[true], &[false, true]),
            Err(KappaError::LengthMismatch(1, 2))
        );
        assert_eq!(cohen_kappa(&[], &[]), Err(KappaError::Empty));
        // all-true vs all-false gives p_e = 0, p_o = 0
        assert_eq!(cohen_kappa(&[true, true], &[false, false]).unwrap(), 0.0);
    }

    #[test]
    fn labels_binarize() {
        assert_eq!(
            cohen_kappa_labels(&[TotallyAgree, Disagree], &[FairAgree, Disagree]).unwrap(),
            1.0
        );
        let json = serde_json::to_string(&[TotallyAgree, FairAgree, Disagree]).unwrap();
        assert_eq!(json, r#"["TOTALLY_AGREE","FAIR_AGREE","DISAGREE"]"#);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pairs() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
            (1usize..40).prop_flat_map(|n| {
                (
                    proptest::collection::vec(any::<bool>(), n),
                    proptest::collection::vec(any::<bool>(), n),
                )
            })
        }

        proptest! {
            #[test]
            fn symmetric_and_bounded((a, b) in pairs()) {
                match (cohen_kappa(&a, &b), cohen_kappa(&b, &a)) {
                    (Ok(x), Ok(y)) => {
                        prop_assert!((x - y).abs() < 1e-12);
                        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&x));
                    }
                    (Err(x), Err(y)) => prop_assert_eq!(x, y),
                    _ => prop_assert!(false, "asymmetric result"),
                }
                prop_assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
            }
        }
    }
}
