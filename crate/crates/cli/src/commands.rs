use std::fs;
use std::io::Write;
use std::path::Path;

use bnchaos::interaction::SignedDigraph;
use bnchaos::markov::{
    is_doubly_stochastic, is_regular, mixing_times_per_start, transition_matrix, MixingOptions,
    Norm, StartVector,
};
use bnchaos::search::{self, SearchParams};
use bnchaos::stats::{run_battery, TestParams, TestReport};
use bnchaos::{
    builtins, is_chaotic, BitSequence, BooleanMap, ChaoticGenerator, Configuration, Error,
    Execution, IterationGraph,
};
use serde_json::json;

use crate::{
    open_output, AnalyzeArgs, BitFormat, CliResult, DotArgs, DotKind, EnumerateArgs, Failure,
    Format, FunctionArgs, GenArgs, GraphArgs, MixingArgs, MixingFlags, NormArg, SearchArgs,
    StartArg, StreamArgs, TestArgs,
};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// First non-blank, non-comment line of a truth-table file, or a builtin.
fn load_function(source: &str, n: Option<usize>) -> CliResult<BooleanMap> {
    let path = Path::new(source);
    let f = if path.is_file() {
        let text = fs::read_to_string(path)?;
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::Parse(format!("{source}: no truth table found")))?;
        line.parse::<BooleanMap>()?
    } else {
        builtins::resolve(source).ok_or_else(|| {
            usage(format!(
                "{source:?} is neither a file nor a builtin ({})",
                builtins::BUILTIN_NAMES
            ))
        })?
    };
    if let Some(n) = n {
        if n != f.n() {
            return Err(usage(format!(
                "--n {n} but the map has {} components",
                f.n()
            )));
        }
    }
    Ok(f)
}

fn load_graph(args: &GraphArgs) -> CliResult<SignedDigraph> {
    match (&args.graph, &args.function) {
        (Some(path), _) => Ok(fs::read_to_string(path)?.parse()?),
        (None, Some(source)) => Ok(SignedDigraph::build(&load_function(source, None)?)),
        (None, None) => Err(usage("one of --graph or --function is required")),
    }
}

fn mixing_options(flags: &MixingFlags) -> CliResult<MixingOptions> {
    if flags.tol.is_nan() || flags.tol <= 0.0 {
        return Err(usage(format!("--tol must be positive, got {}", flags.tol)));
    }
    Ok(MixingOptions {
        tol: flags.tol,
        norm: match flags.norm {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
            NormArg::Linf => Norm::Linf,
        },
        start: match flags.start {
            StartArg::Basis => StartVector::Basis,
            StartArg::Scaled => StartVector::Scaled,
        },
        ..MixingOptions::default()
    })
}

fn table_json(f: &BooleanMap) -> serde_json::Value {
    json!(f.table())
}

pub fn analyze(args: AnalyzeArgs) -> CliResult<()> {
    let f = load_function(&args.function.function, args.function.n)?;
    let opts = mixing_options(&args.mixing)?;
    let gamma = IterationGraph::build(&f);
    let chaotic = is_chaotic(&f);
    let doubly = is_doubly_stochastic(&gamma);
    let regular = is_regular(&gamma);
    let b = match mixing_times_per_start(&transition_matrix(&gamma), &opts) {
        Ok(ks) => ks.into_iter().max(),
        Err(Error::NotRegular | Error::NotMixing(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let b_text = b.map_or_else(|| "none".to_string(), |b| b.to_string());
    let mut out = open_output(args.function.out.as_deref())?;
    match args.format {
        Format::Text => writeln!(
            out,
            "chaotic: {chaotic}, doubly_stochastic: {doubly}, b: {b_text}"
        )?,
        Format::Csv => {
            writeln!(out, "function,n,chaotic,doubly_stochastic,regular,b")?;
            writeln!(
                out,
                "{},{},{chaotic},{doubly},{regular},{b_text}",
                args.function.function,
                f.n()
            )?;
        }
        Format::Jsonl => writeln!(
            out,
            "{}",
            json!({
                "function": args.function.function,
                "n": f.n(),
                "chaotic": chaotic,
                "doubly_stochastic": doubly,
                "regular": regular,
                "b": b,
            })
        )?,
    }
    out.flush()?;
    Ok(())
}

pub fn check_conditions(args: GraphArgs) -> CliResult<()> {
    let g = load_graph(&args)?;
    let report = g.check_conditions();
    let verdict = if report.all() {
        "satisfied"
    } else {
        "not satisfied"
    };
    let mut out = open_output(args.out.as_deref())?;
    match args.format {
        Format::Text => {
            writeln!(out, "acyclic: {}", report.acyclic)?;
            writeln!(
                out,
                "positive_loops_covered: {}",
                report.positive_loops_covered
            )?;
            writeln!(
                out,
                "reachable_from_negative_loop: {}",
                report.reachable_from_negative_loop
            )?;
            writeln!(out, "sufficient conditions: {verdict}")?;
        }
        Format::Csv => {
            writeln!(
                out,
                "acyclic,positive_loops_covered,reachable_from_negative_loop,satisfied"
            )?;
            writeln!(
                out,
                "{},{},{},{}",
                report.acyclic,
                report.positive_loops_covered,
                report.reachable_from_negative_loop,
                report.all()
            )?;
        }
        Format::Jsonl => writeln!(
            out,
            "{}",
            json!({
                "acyclic": report.acyclic,
                "positive_loops_covered": report.positive_loops_covered,
                "reachable_from_negative_loop": report.reachable_from_negative_loop,
                "satisfied": report.all(),
            })
        )?,
    }
    out.flush()?;
    Ok(())
}

pub fn search(args: SearchArgs) -> CliResult<()> {
    let params: Vec<SearchParams> = (0..args.count)
        .map(|k| SearchParams {
            n: args.n,
            rate: args.rate,
            seed: args.seed.wrapping_add(k),
            max_attempts: args.max_attempts,
        })
        .collect();
    for p in &params {
        p.validate().map_err(|e| usage(e.to_string()))?;
    }
    let outcomes = search::generate_many(&params, Execution::default());
    let mut out = open_output(args.out.as_deref())?;
    if let Format::Csv = args.format {
        writeln!(out, "seed,n,rate,removed,remaining,reached_target,table")?;
    }
    for (p, outcome) in params.iter().zip(outcomes) {
        let o = outcome?;
        match args.format {
            Format::Text => writeln!(out, "{}", o.map)?,
            Format::Csv => writeln!(
                out,
                "{},{},{},{},{},{},\"{}\"",
                p.seed,
                p.n,
                p.rate,
                o.removed,
                o.remaining(),
                o.reached_target,
                o.map
            )?,
            Format::Jsonl => writeln!(
                out,
                "{}",
                json!({
                    "seed": p.seed,
                    "n": p.n,
                    "rate": p.rate,
                    "removed": o.removed,
                    "remaining": o.remaining(),
                    "reached_target": o.reached_target,
                    "table": table_json(&o.map),
                })
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

pub fn enumerate(args: EnumerateArgs) -> CliResult<()> {
    let target = load_graph(&args.target)?;
    let stream = search::enumerate_compatible(&target, !args.subgraph)?;
    let chaotic = args.chaotic;
    let doubly = args.double_stochastic;
    let filtered = stream.filter(move |f| {
        (!chaotic || is_chaotic(f)) && (!doubly || is_doubly_stochastic(&IterationGraph::build(f)))
    });
    let limit = args.limit.unwrap_or(usize::MAX);
    let maps: Box<dyn Iterator<Item = BooleanMap>> = if args.reduce {
        Box::new(search::reduce_isomorphic(&target, filtered)?.into_iter())
    } else {
        Box::new(filtered)
    };
    let mut out = open_output(args.target.out.as_deref())?;
    if let Format::Csv = args.target.format {
        writeln!(out, "table")?;
    }
    let mut count = 0usize;
    for f in maps.take(limit) {
        match args.target.format {
            Format::Text => writeln!(out, "{f}")?,
            Format::Csv => writeln!(out, "\"{f}\"")?,
            Format::Jsonl => writeln!(out, "{}", json!({ "table": table_json(&f) }))?,
        }
        count += 1;
    }
    out.flush()?;
    eprintln!("count: {count}");
    Ok(())
}

pub fn mixing_time(args: MixingArgs) -> CliResult<()> {
    let f = load_function(&args.function.function, args.function.n)?;
    let opts = mixing_options(&args.mixing)?;
    let ks = mixing_times_per_start(&transition_matrix(&IterationGraph::build(&f)), &opts)?;
    let b = ks.iter().copied().max().unwrap_or(0);
    let n = f.n();
    let mut out = open_output(args.function.out.as_deref())?;
    match args.format {
        Format::Text => {
            writeln!(out, "b: {b}")?;
            if args.per_start {
                for (x, k) in ks.iter().enumerate() {
                    writeln!(out, "{x:0n$b}: {k}")?;
                }
            }
        }
        Format::Csv => {
            if args.per_start {
                writeln!(out, "start,mixing_time")?;
                for (x, k) in ks.iter().enumerate() {
                    writeln!(out, "{x:0n$b},{k}")?;
                }
            } else {
                writeln!(out, "function,norm,start,tol,b")?;
                writeln!(
                    out,
                    "{},{},{},{},{b}",
                    args.function.function,
                    opts.norm.name(),
                    opts.start.name(),
                    opts.tol
                )?;
            }
        }
        Format::Jsonl => {
            let mut record = json!({
                "function": args.function.function,
                "norm": opts.norm.name(),
                "start": opts.start.name(),
                "tol": opts.tol,
                "b": b,
            });
            if args.per_start {
                record["per_start"] = json!(ks);
            }
            writeln!(out, "{record}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn generate(stream: &StreamArgs) -> CliResult<BitSequence> {
    let source = stream
        .function
        .as_deref()
        .ok_or_else(|| usage("--function is required to generate bits"))?;
    let f = load_function(source, None)?;
    if stream.b == 0 {
        return Err(usage("--b must be positive"));
    }
    let x0 = match &stream.x0 {
        Some(bits) => Configuration::from_bit_str(bits).map_err(|e| usage(e.to_string()))?,
        None => Configuration::new(f.n(), 0)?,
    };
    if x0.n() != f.n() {
        return Err(usage(format!(
            "--x0 has {} bits but the map has {} components",
            x0.n(),
            f.n()
        )));
    }
    let mut gen = ChaoticGenerator::new(f, stream.b, x0, stream.seed)?;
    Ok(gen.bitstream(stream.nbits))
}

pub fn gen(args: GenArgs) -> CliResult<()> {
    let bits = generate(&args.stream)?;
    let mut out = open_output(args.out.as_deref())?;
    match args.format {
        BitFormat::Ascii01 => out.write_all(bits.to_ascii().as_bytes())?,
        BitFormat::Binary => out.write_all(&bits.to_packed_bytes())?,
    }
    out.flush()?;
    Ok(())
}

fn report_text(r: &TestReport) -> String {
    let ps: Vec<String> = r.p_values.iter().map(|p| format!("{p:.6}")).collect();
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    match &r.error {
        Some(e) => format!("{:<20} {:<16} {verdict} ({e})", r.test, r.params),
        None => format!(
            "{:<20} {:<16} {:<20} {verdict}",
            r.test,
            r.params,
            ps.join(" ")
        ),
    }
}

pub fn test(args: TestArgs) -> CliResult<()> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(usage(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    if args.block_len == 0 || args.serial_m < 2 || args.entropy_m == 0 {
        return Err(usage(
            "--block-len >= 1, --serial-m >= 2 and --entropy-m >= 1 are required",
        ));
    }
    let bits = match &args.input {
        Some(path) => BitSequence::read_ascii(path)?,
        None => generate(&args.stream)?,
    };
    let params = TestParams {
        block_len: args.block_len,
        serial_m: args.serial_m,
        entropy_m: args.entropy_m,
    };
    let reports = run_battery(&bits, args.alpha, &params, Execution::default());
    let mut out = open_output(args.out.as_deref())?;
    match args.format {
        Format::Text => {
            writeln!(out, "bits: {}, alpha: {}", bits.len(), args.alpha)?;
            for r in &reports {
                writeln!(out, "{}", report_text(r))?;
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            writeln!(out, "passed: {passed}/{}", reports.len())?;
        }
        Format::Csv => {
            writeln!(out, "{}", TestReport::CSV_HEADER)?;
            for r in &reports {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
        Format::Jsonl => {
            for r in &reports {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(r).expect("report serializes")
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn export_dot(args: DotArgs) -> CliResult<()> {
    let f = load_function(&args.function.function, args.function.n)?;
    let dot = match args.kind {
        DotKind::Iteration => IterationGraph::build(&f).to_dot(),
        DotKind::Interaction => SignedDigraph::build(&f).to_dot(),
    };
    let mut out = open_output(args.function.out.as_deref())?;
    out.write_all(dot.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn export_matrix(args: FunctionArgs) -> CliResult<()> {
    let f = load_function(&args.function, args.n)?;
    let mut out = open_output(args.out.as_deref())?;
    write!(out, "{}", transition_matrix(&IterationGraph::build(&f)))?;
    out.flush()?;
    Ok(())
}
