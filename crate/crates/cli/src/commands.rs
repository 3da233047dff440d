use std::io::Write;
use std::path::Path;

use julia_coding::cod_space::{canonical_form, cod_equal, cod_witness, constant_value, is_degenerate, CodError};
use julia_coding::coding_tree::{image_probe, pi_eval, CodingTree, SymbolSeq};
use julia_coding::eq_graph::{build_eq_graph, multiplicity_classify, relation_decide, EqGraph, LoopSetting, NamedRadial, Verdict};
use julia_coding::lifted_ifs::{
    attractor_raster, closed_form_measure, growth_rate_exact, lift_radial_class, measure_estimate,
    multiplicity_estimate, radial_from_class, tiling_check, Ambient, LiftError, Window,
};
use julia_coding::selftest::{self, CRITERIA};
use julia_coding::{Family, LiftedIfs, MapModel, RadialClass};
use serde_json::{json, Value};

use crate::args::{Cli, CodCommand, CodeCommand, Command, EqgraphCommand, GraphArgs, RadialArgs, TileArgs, TileCommand};
use crate::report::Report;
use crate::CliError;

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let seed = cli.seed;
    let report = match &cli.command {
        Command::Tile(t) => tile(t, seed)?,
        Command::Code(c) => code(c, seed)?,
        Command::Eqgraph(e) => match eqgraph(e, seed, out)? {
            Some(r) => r,
            None => return Ok(()),
        },
        Command::Cod(c) => cod(c, seed)?,
        Command::Selftest(s) => return run_selftest(s.criterion, out),
    };
    write_all(out, report.render().as_bytes())
}

fn write_all(out: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    out.write_all(bytes).map_err(|source| CliError::Io {
        path: "stdout".into(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn family(token: &str) -> Result<Family, CliError> {
    Ok(token.parse::<Family>()?)
}

fn lifted(args: &TileArgs) -> Result<(Family, RadialClass, LiftedIfs), CliError> {
    let fam = family(&args.family)?;
    let class = RadialClass::parse(fam, &args.class)?;
    let ifs = lift_radial_class(&class)?;
    Ok((fam, class, ifs))
}

fn tile(cmd: &TileCommand, seed: u64) -> Result<Report, CliError> {
    match cmd {
        TileCommand::Render { tile, out } => {
            let (fam, class, ifs) = lifted(tile)?;
            let raster = attractor_raster(&ifs, tile.res)?;
            write_file(out, &raster.to_pgm(&format!("{fam} {class} at {} px per unit", tile.res)))?;
            let mut r = Report::new("tile render", Some(tile.res), None, seed);
            r.push("family", fam.to_string())
                .push("class", class.to_string())
                .push("out", out.display().to_string())
                .push("width", raster.width() as u64)
                .push("height", raster.height() as u64)
                .push("pixels", raster.count() as u64)
                .push("iterations", raster.iterations() as u64)
                .push("converged", raster.converged())
                .push("measure_estimate", measure_estimate(&raster));
            Ok(r)
        }
        TileCommand::Measure { tile } => {
            let (fam, class, ifs) = lifted(tile)?;
            let raster = attractor_raster(&ifs, tile.res)?;
            let estimate = measure_estimate(&raster);
            let mut r = Report::new("tile measure", Some(tile.res), None, seed);
            r.push("family", fam.to_string())
                .push("class", class.to_string())
                .push("pixels", raster.count() as u64)
                .push("measure_estimate", estimate);
            match closed_form_measure(&class) {
                Ok(exact) => {
                    let text = exact.to_string();
                    r.push("closed_form", text.clone());
                    let value = fraction_value(&text);
                    if value != 0.0 {
                        r.push("relative_error", (estimate - value).abs() / value);
                    }
                }
                Err(LiftError::UnsupportedFamily(_)) => {
                    r.push("closed_form", "unavailable");
                }
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        TileCommand::CheckTiling {
            tile,
            window,
            min_coverage,
            max_overlap,
        } => {
            let (fam, class, ifs) = lifted(tile)?;
            let (a, b) = parse_window(window)?;
            let w = match ifs.ambient() {
                Ambient::Line => Window::interval(a, b)?,
                Ambient::Plane => Window::square(a, b)?,
            };
            let t = tiling_check(&ifs, w, tile.res)?;
            let mut r = Report::new("tile check-tiling", Some(tile.res), None, seed);
            r.push("family", fam.to_string())
                .push("class", class.to_string())
                .push("window", format!("{a},{b}"))
                .push("window_pixels", t.window_pixels as u64)
                .push("translates", t.translations.len() as u64)
                .push("coverage", t.coverage)
                .push("overlap", t.overlap)
                .push("tiles", t.coverage >= *min_coverage && t.overlap <= *max_overlap);
            Ok(r)
        }
        TileCommand::Multiplicity { tile } => {
            let (fam, class, ifs) = lifted(tile)?;
            let m = multiplicity_estimate(&ifs, tile.res)?;
            let mut r = Report::new("tile multiplicity", Some(tile.res), None, seed);
            r.push("family", fam.to_string())
                .push("class", class.to_string())
                .push("multiplicity", m.n)
                .push("measure_estimate", m.measure)
                .push("gap", m.gap);
            Ok(r)
        }
    }
}

fn fraction_value(text: &str) -> f64 {
    let parse = |t: &str| t.trim().parse::<f64>().unwrap_or(f64::NAN);
    match text.split_once('/') {
        Some((p, q)) => parse(p) / parse(q),
        None => parse(text),
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("--window expects `a,b`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

enum Source {
    Named(LoopSetting, NamedRadial),
    Class(MapModel, RadialClass),
}

fn source(args: &RadialArgs) -> Result<Source, CliError> {
    let fam = family(&args.map)?;
    match (fam, &args.radial, &args.class) {
        (Family::QuadCantor, Some(r), _) => Ok(Source::Named(LoopSetting::quad_cantor()?, r.parse()?)),
        (Family::QuadCantor, None, _) => Err(CliError::Usage("--radial is required for quadcantor".into())),
        (_, None, Some(c)) => Ok(Source::Class(MapModel::new(fam)?, RadialClass::parse(fam, c)?)),
        (_, Some(_), _) => Err(CliError::Usage(format!("--radial applies to quadcantor; use --class for {fam}"))),
        (_, None, None) => Err(CliError::Usage("one of --radial or --class is required".into())),
    }
}

fn tree(src: &Source, depth: usize) -> Result<CodingTree, CliError> {
    Ok(match src {
        Source::Named(setting, name) => CodingTree::extend(setting.map(), &name.radial(setting)?, depth)?,
        Source::Class(map, class) => CodingTree::extend(map, &radial_from_class(map, class)?, depth)?,
    })
}

fn describe(r: &mut Report, args: &RadialArgs, src: &Source) {
    r.push("map", args.map.clone());
    match src {
        Source::Named(_, name) => r.push("radial", name.to_string()),
        Source::Class(_, class) => r.push("class", class.to_string()),
    };
}

fn code(cmd: &CodeCommand, seed: u64) -> Result<Report, CliError> {
    match cmd {
        CodeCommand::Eval {
            radial,
            word,
            eps,
            tree_depth,
        } => {
            if !(*eps > 0.0) {
                return Err(CliError::Usage(format!("--eps must be positive, got {eps}")));
            }
            let src = source(radial)?;
            let seq: SymbolSeq = word.parse()?;
            let t = tree(&src, *tree_depth as usize)?;
            let v = pi_eval(&t, &seq, *eps)?;
            let mut r = Report::new("code eval", None, Some(*tree_depth as usize), seed);
            describe(&mut r, radial, &src);
            r.push("word", seq.to_string())
                .push("eps", *eps)
                .push("point_re", v.point.re)
                .push("point_im", v.point.im)
                .push("bound", v.bound)
                .push("eval_depth", v.depth as u64);
            Ok(r)
        }
        CodeCommand::Growth { radial, kmax } => {
            let src = source(radial)?;
            let k = *kmax as usize;
            let (method, counts) = match &src {
                Source::Class(_, class) => ("exact", growth_rate_exact(&lift_radial_class(class)?, k).counts),
                Source::Named(..) => ("clustered", image_probe(&tree(&src, k)?, k)),
            };
            let d = match &src {
                Source::Class(_, c) => c.degree(),
                Source::Named(..) => 2,
            };
            let full = counts
                .iter()
                .enumerate()
                .all(|(i, &c)| d.checked_pow(i as u32 + 1) == Some(c));
            let mut r = Report::new("code growth", None, Some(k), seed);
            describe(&mut r, radial, &src);
            r.push("method", method)
                .push("counts", Value::from(counts.iter().map(|&c| c as u64).collect::<Vec<_>>()))
                .push("full_growth", full);
            Ok(r)
        }
    }
}

fn graph_setting(args: &GraphArgs) -> Result<(LoopSetting, NamedRadial), CliError> {
    let fam = family(&args.map)?;
    if fam != Family::QuadCantor {
        return Err(CodError::UnsupportedFamily(fam).into());
    }
    Ok((LoopSetting::quad_cantor()?, args.radial.parse()?))
}

fn graph(setting: &LoopSetting, a: NamedRadial, b: NamedRadial) -> Result<EqGraph, CliError> {
    Ok(build_eq_graph(setting, &a.radial(setting)?, &b.radial(setting)?)?)
}

fn eqgraph(cmd: &EqgraphCommand, seed: u64, out: &mut dyn Write) -> Result<Option<Report>, CliError> {
    match cmd {
        EqgraphCommand::Build { graph: args, radial2, out: path } => {
            let (setting, a) = graph_setting(args)?;
            let b: NamedRadial = match radial2 {
                Some(s) => s.parse()?,
                None => a,
            };
            let g = graph(&setting, a, b)?;
            let name = if a == b { a.to_string() } else { format!("{a}_{b}") };
            let dot = g.to_dot(&name);
            let Some(path) = path else {
                write_all(out, dot.as_bytes())?;
                return Ok(None);
            };
            write_file(path, dot.as_bytes())?;
            let mut r = Report::new("eqgraph build", None, None, seed);
            r.push("radial", a.to_string())
                .push("radial2", b.to_string())
                .push("out", path.display().to_string())
                .push("vertices", g.vertices().len() as u64)
                .push("edges", g.edges().len() as u64);
            Ok(Some(r))
        }
        EqgraphCommand::Decide { graph: args, a, b } => {
            let (setting, name) = graph_setting(args)?;
            let sa: SymbolSeq = a.parse()?;
            let sb: SymbolSeq = b.parse()?;
            let g = graph(&setting, name, name)?;
            let verdict = match relation_decide(&g, &sa, &sb) {
                Verdict::Related => "related".to_string(),
                Verdict::Unrelated => "unrelated".to_string(),
                Verdict::UndecidedBeyond(n) => format!("undecided beyond {n}"),
            };
            let mut r = Report::new("eqgraph decide", None, None, seed);
            r.push("radial", name.to_string())
                .push("a", sa.to_string())
                .push("b", sb.to_string())
                .push("verdict", verdict);
            Ok(Some(r))
        }
        EqgraphCommand::Mult { graph: args, samples, depth } => {
            let (setting, name) = graph_setting(args)?;
            let g = graph(&setting, name, name)?;
            let m = multiplicity_classify(&g, *samples as usize, *depth as usize, seed)?;
            let histogram: serde_json::Map<String, Value> =
                m.histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            let mut r = Report::new("eqgraph mult", None, Some(m.depth), seed);
            r.push("radial", name.to_string())
                .push("samples", m.samples as u64)
                .push("histogram", Value::Object(histogram))
                .push("modal", m.modal)
                .push("modal_frequency", m.modal_frequency)
                .push("max_observed", m.max_observed)
                .push("structural_bound", m.structural_bound)
                .push("certificates", Value::from(m.certificate_text()));
            Ok(Some(r))
        }
    }
}

fn cod(cmd: &CodCommand, seed: u64) -> Result<Report, CliError> {
    match cmd {
        CodCommand::Equal { family: f, a, b } => {
            let fam = family(f)?;
            let ca = RadialClass::parse(fam, a)?;
            let cb = RadialClass::parse(fam, b)?;
            let equal = cod_equal(&ca, &cb)?;
            let witness = cod_witness(&ca, &cb)?;
            let mut r = Report::new("cod equal", None, None, seed);
            r.push("family", fam.to_string())
                .push("a", ca.to_string())
                .push("b", cb.to_string())
                .push("equal", equal)
                .push("witness", witness.map_or_else(|| "none".to_string(), |t| t.to_string()));
            Ok(r)
        }
        CodCommand::Canon { family: f, a } => {
            let fam = family(f)?;
            let ca = RadialClass::parse(fam, a)?;
            let mut r = Report::new("cod canon", None, None, seed);
            r.push("family", fam.to_string())
                .push("a", ca.to_string())
                .push("degenerate", is_degenerate(&ca));
            if let Some(v) = constant_value(&ca) {
                r.push("constant_value", v.to_string());
            }
            r.push("canonical", canonical_form(&ca)?.to_string());
            Ok(r)
        }
    }
}

fn run_selftest(only: Option<u8>, out: &mut dyn Write) -> Result<(), CliError> {
    let ids: Vec<u8> = match only {
        Some(id) => vec![id],
        None => CRITERIA.iter().map(|&(id, _)| id).collect(),
    };
    let mut failed = 0;
    for &id in &ids {
        let result = selftest::run(id)?;
        let mut text = format!("{result}\n");
        for line in &result.details {
            text.push_str(&format!("    {line}\n"));
        }
        write_all(out, text.as_bytes())?;
        let _ = out.flush();
        if !result.pass {
            failed += 1;
        }
    }
    write_all(out, format!("passed = {}/{}\n", ids.len() - failed, ids.len()).as_bytes())?;
    if failed > 0 {
        return Err(CliError::SelftestFailed {
            failed,
            total: ids.len(),
        });
    }
    Ok(())
}
