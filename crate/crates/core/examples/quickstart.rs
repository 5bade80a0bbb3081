use std::sync::Arc;

use gsdca::datagen::{gen_lasso, Family, SynthSpec};
use gsdca::diagnostics::compute_reference;
use gsdca::losses::LossModel;
use gsdca::regularizers::Penalty;
use gsdca::sdca::{run, RunConfig};
use gsdca::splitting::{split, ProblemSpec};

fn main() -> gsdca::Result<()> {
    let synth = gen_lasso::<f64>(&SynthSpec::new(Family::Lasso, 400, 800, 20, 1))?;
    let spec = ProblemSpec::new(Arc::new(synth.data), LossModel::squared(), Penalty::l1(), 0.1)?;
    let sp = split(&spec, 0.25)?.with_step(5e-4)?;
    let reference = compute_reference(&sp)?;
    let out = run(&sp, &RunConfig::new(200, 7), Some(&reference))?;
    let last = out.trace.last().unwrap();
    println!("epoch {} objective {:.10} gap {:.3e}", last.epoch, last.objective, last.gap.unwrap());
    Ok(())
}
