//! Bootstrap plan, out-of-bag sets and the per-point aggregation weights.

use snapens::resample::{external_split, make_bootstrap_plan, oob_prediction_weights};

fn main() -> snapens::Result<()> {
    let (n, m) = (1000, 20);
    let plan = make_bootstrap_plan(n, m, 11)?;
    for k in 0..3 {
        let mut distinct = plan.train_indices(k).to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        println!(
            "member {k}: {} distinct training points, {} out of bag",
            distinct.len(),
            plan.oob_indices(k).len()
        );
    }

    let weights = oob_prediction_weights(plan.gamma(), m)?;
    println!(
        "point 0 weights {:.3?}; {} points have no out-of-bag member",
        &weights.weights[..m],
        weights.uncovered.len()
    );

    let (train, val) = external_split(n, 0.2, 11)?;
    println!("external split: {} train / {} validation", train.len(), val.len());

    let text = plan.to_text();
    println!("plan text form: {} lines", text.lines().count());
    Ok(())
}
