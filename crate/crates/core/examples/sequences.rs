//! The sequence inequality for nonincreasing x_n^p_n and the counterexample
//! that breaks it once monotonicity is dropped.

use vexle::sequences::{check_sequence_inequality, decaying_profile, example41_sequence, ExponentSeq, SeqMode};

fn main() -> vexle::Result<()> {
    let p = ExponentSeq::from_fn(12, 0.4, decaying_profile(0.4, 0.9))?;
    let x: Vec<f64> = (1..=12).map(|n| 1.0 / n as f64).collect();
    for mode in [SeqMode::Finite, SeqMode::Limit] {
        let r = check_sequence_inequality(&x, &p, mode)?;
        println!(
            "{mode:?}: {:.6} <= {:.6} <= {:.6}  ({} / {})",
            r.lhs, r.mid, r.rhs, r.left_holds, r.right_holds
        );
    }

    println!("{:>9}  {:>10}  {:>10}  {:>7}", "K", "lhs", "rhs", "ratio");
    for k in [100, 10_000, 1_000_000] {
        let e = example41_sequence(0.4, decaying_profile(0.4, 0.6), k)?;
        println!("{k:>9}  {:>10.6}  {:>10.6}  {:>7.4}", e.lhs, e.rhs, e.ratio());
    }
    Ok(())
}
