use revisp::io::{synth_dataset, Split, SynthConfig};

use super::Context;
use crate::args::{SplitArg, SynthArgs};
use crate::error::{CliError, CliResult};

pub fn cmd_synth(ctx: &Context, args: &SynthArgs) -> CliResult<String> {
    if args.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let cfg = SynthConfig {
        count: args.count,
        height: args.height,
        width: args.width,
        seed: ctx.seed,
        split: match args.split {
            SplitArg::Train => Split::Train,
            SplitArg::Test => Split::Test,
        },
        ..Default::default()
    };
    let manifest = synth_dataset(&args.out, &cfg)?;
    let (target, oof) = manifest.partition().counts();
    Ok(format!(
        "wrote {} pairs ({target} target, {oof} oof) to {}\n",
        manifest.len(),
        args.out.join("manifest.json").display()
    ))
}
