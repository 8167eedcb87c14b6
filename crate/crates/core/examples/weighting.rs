//! Weight laws and what they do to a selection with one poor member.

use snapens::ensemble::{ensemble_sse, PredictionCube, Selection};
use snapens::weighting::{weight_selection, weights, WeightLaw};

fn main() -> snapens::Result<()> {
    let errors = [0.8, 1.0, 1.2, 5.0];
    for law in [WeightLaw::Power, WeightLaw::Exp] {
        for alpha in [0.0, 1.0, 2.0, 10.0] {
            let w = weights(law, &errors, alpha)?;
            println!("{:<5} alpha {alpha:>4}: {:.3?}", law.to_string(), w);
        }
    }

    // Three decent members, one that is off by 3 everywhere.
    let targets = vec![0.0, 1.0, 2.0, 3.0];
    let mut values = Vec::new();
    for offset in [0.1, -0.1, 0.05, 3.0] {
        values.extend(targets.iter().map(|y| y + offset));
    }
    let cube = PredictionCube::new(4, 1, 4, values, targets)?;
    let plain = Selection::uniform(vec![0; 4]);
    let weighted = weight_selection(&plain, &cube, WeightLaw::Power, 2.0)?;
    println!("weights {:.4?}", weighted.weights());
    println!(
        "SSE uniform {:.4}, weighted {:.4}",
        ensemble_sse(&cube, &plain)?,
        ensemble_sse(&cube, &weighted)?
    );
    Ok(())
}
