use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub const DEFAULT_RESOLUTION: u32 = 512;
pub const DEFAULT_DEPTH: usize = 40;
pub const DEFAULT_SEED: u64 = julia_coding::eq_graph::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "jcode", version, about = "Symbolic codings of Julia sets")]
pub struct Cli {
    /// Read further flags from a `key = value` file; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Seed for every random choice, decimal or 0x-prefixed hex.
    #[arg(long, global = true, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lifted tiles of the Euclidean-cover families.
    #[command(subcommand)]
    Tile(TileCommand),
    /// The coding map.
    #[command(subcommand)]
    Code(CodeCommand),
    /// Graphs of the coding relation for z² - 3.
    #[command(subcommand)]
    Eqgraph(EqgraphCommand),
    /// Classes of radials up to deck transformations.
    #[command(subcommand)]
    Cod(CodCommand),
    /// Runs the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct TileArgs {
    /// Family token: power:d, cheb:d or lattes.
    #[arg(long)]
    pub family: String,
    /// Radial class, e.g. "0,3/2" or "i/2,1/2+1+i".
    #[arg(long)]
    pub class: String,
    /// Pixels per unit length.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = clap::value_parser!(u32).range(1..))]
    pub res: u32,
}

#[derive(Debug, Subcommand)]
pub enum TileCommand {
    /// Writes the tile raster as a binary PGM.
    Render {
        #[command(flatten)]
        tile: TileArgs,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Raster measure next to the closed form.
    Measure {
        #[command(flatten)]
        tile: TileArgs,
    },
    /// Covers a window with deck translates of the tile.
    CheckTiling {
        #[command(flatten)]
        tile: TileArgs,
        /// Window `a,b`: the interval [a, b] or the square [a, b]².
        #[arg(long, default_value = "0,4")]
        window: String,
        #[arg(long, default_value_t = 0.99)]
        min_coverage: f64,
        #[arg(long, default_value_t = 0.02)]
        max_overlap: f64,
    },
    /// Integer multiplicity read off the measure.
    Multiplicity {
        #[command(flatten)]
        tile: TileArgs,
    },
}

#[derive(Debug, Args)]
pub struct RadialArgs {
    /// Family token: power:d, cheb:d, lattes or quadcantor.
    #[arg(long)]
    pub map: String,
    /// Named radial r1, r2 or r3 (quadcantor only).
    #[arg(long, conflicts_with = "class")]
    pub radial: Option<String>,
    /// Radial class (Euclidean families only).
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CodeCommand {
    /// Evaluates the coding map at a word; `^` marks the periodic tail.
    Eval {
        #[command(flatten)]
        radial: RadialArgs,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Levels of lifted legs stored in the tree.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        tree_depth: u32,
    },
    /// Distinct points per level: exact counts for affine lifts, clustered
    /// tree points otherwise.
    Growth {
        #[command(flatten)]
        radial: RadialArgs,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..=24))]
        kmax: u32,
    },
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, default_value = "quadcantor")]
    pub map: String,
    /// Named radial r1, r2 or r3.
    #[arg(long)]
    pub radial: String,
}

#[derive(Debug, Subcommand)]
pub enum EqgraphCommand {
    /// Builds the graph and writes Graphviz DOT.
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        /// Second radial; defaults to the first.
        #[arg(long)]
        radial2: Option<String>,
        /// Output file; without it the DOT text goes to stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Decides whether two sequences code the same point.
    Decide {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Class sizes of the coding relation by sampling.
    Mult {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u32).range(1..))]
        samples: u32,
        #[arg(long, default_value_t = DEFAULT_DEPTH as u32, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodCommand {
    /// Whether two classes differ by a deck transformation.
    Equal {
        #[arg(long)]
        family: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Canonical representative of a class.
    Canon {
        #[arg(long)]
        family: String,
        #[arg(long)]
        a: String,
    },
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Run a single criterion.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
    pub criterion: Option<u8>,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0xC0D1A6"), Ok(0xC0D1A6));
        assert_eq!(parse_seed("17"), Ok(17));
        assert!(parse_seed("x").is_err());
    }
}
