//! Command-line flags, configuration files and their merge.
//!
//! Every subcommand flag is optional at the clap level so that a value can
//! come from either the command line or the `--config` TOML file. Flags win.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use skewbaker_core::{Complex64, PlanePoint};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "skewbaker", version, about = "Orbit, domain and basin tools for F(z,w) = (e^{-(z+w)}+z+w, e^{-2w}+2w+1)")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Report format: text (key=value lines) or tree (JSON).
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Worker threads for rendering.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print an orbit table.
    Iterate(IterateArgs),
    /// Run a pseudorandom verification suite.
    Verify(VerifyArgs),
    /// Solve h(zeta) = c for a witness sequence.
    Witness(WitnessArgs),
    /// Render a 2D slice classified by first entry into L.
    Render(RenderArgs),
    /// Sub-mean-value probe of u_n along a complex line.
    Psh(PshArgs),
}


#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateArgs {
    /// Seed z as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Seed w as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// invariance, growth, telescoping or psh-range.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// 64-bit seed of the ChaCha8 generator.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessArgs {
    /// Target value c as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    /// First branch index of the general solver.
    #[arg(long, allow_hyphen_values = true)]
    pub first_branch: Option<i64>,
    /// Also write the witness table as CSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderArgs {
    /// Base point z as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Base point w as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Horizontal direction in C² as "zre,zim,wre,wim".
    #[arg(long, allow_hyphen_values = true)]
    pub dir_u: Option<String>,
    /// Vertical direction in C² as "zre,zim,wre,wim".
    #[arg(long, allow_hyphen_values = true)]
    pub dir_v: Option<String>,
    /// Horizontal parameter range "min,max".
    #[arg(long, allow_hyphen_values = true)]
    pub u_range: Option<String>,
    /// Vertical parameter range "min,max".
    #[arg(long, allow_hyphen_values = true)]
    pub v_range: Option<String>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Entry into L means Re w - Re z > threshold (default 1).
    #[arg(long)]
    pub alpha_threshold: Option<f64>,
    /// Palette TOML file.
    #[arg(long)]
    pub palette: Option<PathBuf>,
    /// Output P6 pixmap.
    #[arg(long)]
    pub ppm: Option<PathBuf>,
    /// Output per-pixel CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PshArgs {
    /// Probe center z as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Probe center w as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Line direction in C² as "zre,zim,wre,wim".
    #[arg(long, allow_hyphen_values = true)]
    pub dir: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
}

/// Layout of a `--config` file: common keys at top level, one table per
/// subcommand.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub workers: Option<usize>,
    pub iterate: IterateArgs,
    pub verify: VerifyArgs,
    pub witness: WitnessArgs,
    pub render: RenderArgs,
    pub psh: PshArgs,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Field-wise `flag.or(config)`.
pub trait Merge {
    fn merge(self, fallback: Self) -> Self;
}

macro_rules! impl_merge {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            fn merge(self, fallback: Self) -> Self {
                Self { $($field: self.$field.or(fallback.$field)),* }
            }
        }
    };
}

impl_merge!(IterateArgs { z, w, steps });
impl_merge!(VerifyArgs { suite, samples, seed, steps });
impl_merge!(WitnessArgs { target, count, first_branch, table });
impl_merge!(RenderArgs {
    z, w, dir_u, dir_v, u_range, v_range, width, height, budget, alpha_threshold, palette, ppm, csv,
});
impl_merge!(PshArgs { z, w, dir, radius, samples, steps });

impl Merge for CommonArgs {
    fn merge(self, fallback: Self) -> Self {
        Self {
            config: self.config,
            out: self.out.or(fallback.out),
            format: self.format.or(fallback.format),
            workers: self.workers.or(fallback.workers),
        }
    }
}

pub fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option --{flag}")))
}

fn parse_reals(text: &str, expected: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if v.len() == expected && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!(
            "{what} must be {expected} comma-separated finite numbers, got {text:?}"
        ))),
    }
}

/// `"re,im"`; a lone `"re"` is accepted as a real number.
pub fn parse_complex(text: &str, what: &str) -> Result<Complex64, CliError> {
    if !text.contains(',') {
        let v = parse_reals(text, 1, what)?;
        return Ok(Complex64::new(v[0], 0.0));
    }
    let v = parse_reals(text, 2, what)?;
    Ok(Complex64::new(v[0], v[1]))
}

/// `"zre,zim,wre,wim"`.
pub fn parse_vector(text: &str, what: &str) -> Result<PlanePoint, CliError> {
    let v = parse_reals(text, 4, what)?;
    Ok(PlanePoint::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])))
}

/// `"min,max"`.
pub fn parse_range(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let v = parse_reals(text, 2, what)?;
    Ok((v[0], v[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("2,-1.5", "z").unwrap(), Complex64::new(2.0, -1.5));
        assert_eq!(parse_complex("3", "z").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("a,b", "z").is_err());
        assert!(parse_complex("1,2,3", "z").is_err());
        assert!(parse_complex("inf,0", "z").is_err());
    }

    #[test]
    fn vector_and_range_parsing() {
        assert_eq!(parse_vector("1,0,0,0", "d").unwrap(), PlanePoint::real(1.0, 0.0));
        assert!(parse_vector("1,0", "d").is_err());
        assert_eq!(parse_range("-5,5", "r").unwrap(), (-5.0, 5.0));
    }

    #[test]
    fn flags_win_over_config() {
        let flags = RenderArgs { width: Some(8), ..Default::default() };
        let file = RenderArgs { width: Some(16), height: Some(4), ..Default::default() };
        let merged = flags.merge(file);
        assert_eq!(merged.width, Some(8));
        assert_eq!(merged.height, Some(4));
    }

    #[test]
    fn config_file_layout() {
        let cfg: ConfigFile = toml::from_str(
            "format = \"tree\"\n[render]\nwidth = 32\nz = \"1,0\"\n[verify]\nsuite = \"growth\"\n",
        )
        .unwrap();
        assert_eq!(cfg.format.as_deref(), Some("tree"));
        assert_eq!(cfg.render.width, Some(32));
        assert_eq!(cfg.verify.suite.as_deref(), Some("growth"));
        assert!(toml::from_str::<ConfigFile>("[render]\nbogus = 1\n").is_err());
    }
}
