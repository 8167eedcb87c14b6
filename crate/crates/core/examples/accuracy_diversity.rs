//! Ensemble error = mean member error - member spread, checked on a toy cube.

use snapens::ensemble::{ensemble_sse, PredictionCube, Selection};
use snapens::weighting::accuracy_diversity;

fn main() -> snapens::Result<()> {
    let targets = vec![1.0, 2.0, 3.0];
    let values = vec![
        1.5, 2.5, 2.0, // member 0
        0.5, 1.0, 3.5, // member 1
        1.2, 2.4, 3.3, // member 2
    ];
    let cube = PredictionCube::new(3, 1, 3, values, targets)?;
    let sel = Selection::uniform(vec![0, 0, 0]);
    let (err, var) = accuracy_diversity(&cube, &sel)?;
    let mse = ensemble_sse(&cube, &sel)? / cube.points() as f64;
    println!("mean member error {err:.4}");
    println!("member spread     {var:.4}");
    println!("difference        {:.4}", err - var);
    println!("ensemble MSE      {mse:.4}");
    Ok(())
}
