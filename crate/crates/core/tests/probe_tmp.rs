use ppdp_core::*;

#[test]
#[ignore]
fn probe_exhaustive_agreement() {
    let mut checked = 0usize;
    let mut disagreements = Vec::new();
    let mut errors = Vec::new();
    let opts = SolveOptions::default();
    for (m, n) in [(1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4)] {
        for a in oracle::enumerate_tiny_family(m, n, &[-1, 0, 1]).unwrap() {
            let (feasible, support) = max_support_oracle(&a).unwrap();
            match ppdp_ma(&a, &opts) {
                Ok(out) => {
                    let solver_feasible =
                        out.certificate.kind == CertificateKind::PrimalFeasible;
                    if solver_feasible != feasible {
                        disagreements.push((a.clone(), feasible, out.certificate.kind));
                    } else if feasible && out.certificate.support != support {
                        disagreements.push((a.clone(), feasible, out.certificate.kind));
                        eprintln!(
                            "support mismatch on {:?}: oracle {:?} solver {:?}",
                            a.entries(),
                            support,
                            out.certificate.support
                        );
                    }
                }
                Err(e) => errors.push((a.clone(), format!("{e}"))),
            }
            checked += 1;
        }
    }
    eprintln!("checked {checked}");
    for (a, feas, kind) in disagreements.iter().take(10) {
        eprintln!(
            "disagree {}x{} {:?}: oracle feasible={feas}, solver {kind:?}",
            a.rows(),
            a.cols(),
            a.entries()
        );
    }
    for (a, e) in errors.iter().take(10) {
        eprintln!("error {}x{} {:?}: {e}", a.rows(), a.cols(), a.entries());
    }
    assert!(
        disagreements.is_empty() && errors.is_empty(),
        "{} disagreements, {} errors",
        disagreements.len(),
        errors.len()
    );
}
