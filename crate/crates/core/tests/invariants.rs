//! Cross-module invariants over the whole built-in net registry, beyond
//! the targeted acceptance criteria.

use netscope_core::net::generate_points;
use netscope_core::norms::{l2_haar, l2_warnock_sq};
use netscope_core::quality::Budget;
use netscope_core::verify::{
    builtin_instances, hammersley_family, interlaced_faure_family, verify_decay_family,
    CheckStatus,
};

/// The Haar-Parseval partial sums stay below the exact squared norm
/// (Bessel) and close the gap to 1e-3 relative at j_max = n + 6, for
/// every built-in net.
#[test]
fn oracle_pair_and_bessel_across_builtins() {
    for inst in builtin_instances() {
        let g = &inst.g;
        let pts = generate_points(g);
        let w2 = l2_warnock_sq(&pts);
        let shallow = l2_haar(&pts, g.n() as u32 + 2);
        assert!(
            shallow.squared <= w2 * (1.0 + 1e-12),
            "{}: Bessel violated: {} > {}",
            inst.id,
            shallow.squared,
            w2
        );
        let deep = l2_haar(&pts, g.n() as u32 + 6);
        assert!(deep.squared >= shallow.squared - 1e-15, "{}: not monotone", inst.id);
        let rel = (w2 - deep.squared).abs() / w2;
        assert!(rel <= 1e-3, "{}: oracle gap {rel:.3e}", inst.id);
    }
}

/// Decay ratios stay bounded with no upward trend over extended ranges
/// (the shipped families again, pushed past the acceptance window).
#[test]
fn decay_ratios_bounded_on_extended_ranges() {
    let budget = Budget::default();
    for (id, fam, sigma) in [
        ("hammersley-b2", hammersley_family(2, 3..=10), 1u32),
        ("ilfaure-b2-d1", interlaced_faure_family(2, 1, 3..=10), 2),
        ("ilfaure-b3-d2", interlaced_faure_family(3, 2, 3..=9), 2),
    ] {
        let r = verify_decay_family(id, &fam, sigma, &budget);
        assert!(
            r.status == CheckStatus::Pass,
            "{id} sigma={sigma}: {:?} {:?}",
            r.status,
            r.witness
        );
    }
}
