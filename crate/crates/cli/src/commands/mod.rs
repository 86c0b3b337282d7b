//! One module per subcommand. Each prints its JSON summary to stdout,
//! writes artifacts through the [`crate::manifest::RunContext`], and maps
//! core errors onto the validation/numerical exit codes.

pub mod bekenstein;
pub mod cat_decay;
pub mod dephase;
pub mod evolve;
pub mod noise_check;
pub mod planck;
pub mod sn_soliton;
pub mod unravel;

use std::path::Path;

use crate::error::CliError;
use crate::manifest::RunContext;

pub(crate) fn load_json<T: serde::de::DeserializeOwned>(
    ctx: &mut RunContext,
    path: &Path,
) -> Result<T, CliError> {
    let bytes = ctx.read_input(path)?;
    serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
