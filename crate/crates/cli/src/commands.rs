use std::fs;
use std::path::{Path, PathBuf};

use hawkes_granger::gof::{component_quantiles, ks_test, residual_transform, QuantileReport};
use hawkes_granger::graph::{
    ancestors, granger_noncausal, graph_from_estimate, markov_subprocess_graph, moral_graph, parse_edge_list,
    reduce, separated, DisplaySet, ParsedGraph,
};
use hawkes_granger::{
    bin, fit, simulate, CausalityGraph, EstimatorConfig, IntensityModel, SimulationConfig, ThresholdRule,
    UndirectedGraph, VertexSet,
};

use crate::formats::{baseline_table, write_events, write_steps, EstimateFile, EventTable, ModelSpec};
use crate::{Command, Common, Failure, Query, RunConfig};

/// 5% critical value of `√n·D` for the Kolmogorov distribution.
const KS_CRITICAL_5: f64 = 1.358;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Flags merged over the optional config file.
struct Settings {
    c: Common,
    file: RunConfig,
}

impl Settings {
    fn load(common: Common) -> Result<Settings, Failure> {
        let file: RunConfig = match &common.config {
            Some(path) => serde_json::from_str(&read(path)?)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?,
            None => RunConfig::default(),
        };
        let c = Common {
            h: common.h.or(file.h),
            k: common.k.or(file.k),
            horizon: common.horizon.or(file.horizon),
            seed: common.seed.or(file.seed),
            ridge: common.ridge.or(file.ridge),
            threshold_c: common.threshold_c.or(file.threshold_c),
            out: common.out.or_else(|| file.out.clone()),
            config: common.config,
        };
        if let Some(h) = c.h {
            positive("--h", h)?;
        }
        if let Some(t) = c.horizon {
            positive("--T", t)?;
        }
        if let Some(c) = c.threshold_c {
            positive("--threshold-c", c)?;
        }
        if c.k == Some(0) {
            return Err(Failure::Usage("--k must be at least 1".into()));
        }
        if let Some(r) = c.ridge {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Failure::Usage(format!("--ridge must be >= 0, got {r}")));
            }
        }
        Ok(Settings { c, file })
    }

    fn out(&self) -> Result<&Path, Failure> {
        self.c.out.as_deref().ok_or_else(|| missing("--out"))
    }
}

fn positive(flag: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{flag} must be positive, got {v}")))
    }
}

fn missing(flag: &str) -> Failure {
    Failure::Usage(format!("{flag} is required (as a flag or in --config)"))
}

/// `1,2,3`, `{1,2,3}` or empty; 1-based labels.
fn parse_set(text: &str) -> Result<VertexSet, Failure> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Failure::Usage(format!("bad vertex label {t:?} in set {text:?}"))),
        })
        .collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate { model, max_events, common } => cmd_simulate(&model, max_events, common),
        Command::Estimate { events, d, nonneg, steps_out, common } => {
            cmd_estimate(&events, d, nonneg, steps_out, common)
        }
        Command::Graph { estimate, common } => cmd_graph(&estimate, common),
        Command::Markov { graph, query, common } => cmd_markov(&graph, query, common),
        Command::Gof { events, estimate, model, points, common } => {
            cmd_gof(&events, estimate.as_deref(), model.as_deref(), points, common)
        }
    }
}

fn cmd_simulate(model_path: &Path, max_events: Option<usize>, common: Common) -> Result<(), Failure> {
    let s = Settings::load(common)?;
    let model = ModelSpec::parse(&read(model_path)?)?;
    let horizon = s.c.horizon.ok_or_else(|| missing("--T"))?;
    let mut config = SimulationConfig::new(horizon, s.c.seed.unwrap_or(0));
    if let Some(m) = max_events.or(s.file.max_events) {
        config = config.with_max_events(m);
    }
    let out = s.out()?;
    let stream = simulate(&model, &config)?;
    write(out, &write_events(&stream))?;
    println!("events: {}", stream.total_events());
    let rates: Vec<String> = stream.empirical_rates().iter().map(|r| r.to_string()).collect();
    println!("empirical rates: {}", rates.join(" "));
    Ok(())
}

fn steps_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".steps.csv");
    out.with_file_name(name)
}

fn cmd_estimate(
    events: &Path,
    d: Option<usize>,
    nonneg: bool,
    steps_out: Option<PathBuf>,
    common: Common,
) -> Result<(), Failure> {
    let s = Settings::load(common)?;
    let h = s.c.h.ok_or_else(|| missing("--h"))?;
    let k = s.c.k.ok_or_else(|| missing("--k"))?;
    let out = s.out()?;
    let table = EventTable::parse(&read(events)?, d.unwrap_or(0))?;
    if let Some(d) = d {
        if table.events.len() > d {
            return Err(Failure::Usage(format!("event file has {} components but --d is {d}", table.events.len())));
        }
    }
    let horizon = s.c.horizon.unwrap_or_else(|| table.last_time());
    let stream = table.into_stream(horizon)?;
    let binned = bin(&stream, h)?;
    let config = EstimatorConfig::new(h, k).with_ridge(s.c.ridge.unwrap_or(0.0)).with_nonneg_projection(nonneg);
    let est = fit(&binned, &config)?;

    let json = serde_json::to_string_pretty(&EstimateFile::from_estimate(&est, horizon)).expect("serializable");
    write(out, &(json + "\n"))?;
    let steps = steps_out.or_else(|| s.file.steps_out.clone()).unwrap_or_else(|| steps_path(out));
    write(&steps, &write_steps(&est))?;

    println!("components: {}, events: {}, bins: {}, T: {horizon}", est.d, stream.total_events(), binned.len());
    let dropped: usize = est.diagnostics.dropped_events.iter().sum();
    if dropped > 0 {
        println!("dropped trailing events: {dropped}");
    }
    println!("condition estimate: {}", est.diagnostics.condition_estimate);
    println!("baseline intensity estimates (per unit time):");
    print!("{}", baseline_table(&est.baseline_rates()));
    Ok(())
}

fn cmd_graph(estimate: &Path, common: Common) -> Result<(), Failure> {
    let s = Settings::load(common)?;
    let est = EstimateFile::parse(&read(estimate)?)?;
    let rule = ThresholdRule { c: s.c.threshold_c.unwrap_or(ThresholdRule::default().c) };
    let g = graph_from_estimate(&est, &rule);
    let text = g.to_edge_list();
    emit(s.c.out.as_deref(), &text)?;
    let summary = format!(
        "edges: {}\nisolated: {}",
        g.edges().len(),
        match g.isolated() {
            iso if iso.is_empty() => "none".to_string(),
            iso => DisplaySet(&iso).to_string(),
        }
    );
    if s.c.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn directed(parsed: ParsedGraph, query: &str) -> Result<CausalityGraph, Failure> {
    match parsed {
        ParsedGraph::Directed(g) => Ok(g),
        ParsedGraph::Undirected(_) => Err(Failure::Usage(format!("{query} needs a directed (`->`) edge list"))),
    }
}

fn cmd_markov(graph: &Path, query: Query, common: Common) -> Result<(), Failure> {
    let s = Settings::load(common)?;
    let parsed = parse_edge_list(&read(graph)?)?;
    let out = s.c.out.as_deref();
    let undirected_out = |u: &UndirectedGraph| emit(out, &u.to_edge_list());
    match query {
        Query::Noncausal { a, b, s: cond } => {
            let g = directed(parsed, "noncausal")?;
            let verdict = granger_noncausal(&g, &parse_set(&a)?, &parse_set(&b)?, &parse_set(&cond)?)?;
            emit(out, &format!("noncausal: {verdict}\n"))
        }
        Query::Separated { a, b, c } => {
            let u = match parsed {
                ParsedGraph::Undirected(u) => u,
                ParsedGraph::Directed(_) => {
                    return Err(Failure::Usage("separated needs an undirected (`--`) edge list".into()))
                }
            };
            let verdict = separated(&u, &parse_set(&a)?, &parse_set(&b)?, &parse_set(&c)?)?;
            emit(out, &format!("separated: {verdict}\n"))
        }
        Query::Moral => undirected_out(&moral_graph(&directed(parsed, "moral")?)),
        Query::Ancestors { b } => {
            let g = directed(parsed, "ancestors")?;
            let b = parse_set(&b)?;
            if let Some(v) = b.iter().find(|v| !g.vertices().contains(v)) {
                return Err(Failure::Usage(format!("vertex {} not in graph", v + 1)));
            }
            emit(out, &format!("ancestors: {}\n", DisplaySet(&ancestors(&g, &b))))
        }
        Query::Subprocess { s: set } => {
            let g = directed(parsed, "subprocess")?;
            undirected_out(&markov_subprocess_graph(&g, &parse_set(&set)?)?)
        }
        Query::Reduce { s: set } => {
            let set = parse_set(&set)?;
            let h = match parsed {
                ParsedGraph::Undirected(u) => u,
                ParsedGraph::Directed(g) => markov_subprocess_graph(&g, &set)?,
            };
            undirected_out(&reduce(&h, &set)?)
        }
    }
}

fn cmd_gof(
    events: &Path,
    estimate: Option<&Path>,
    model: Option<&Path>,
    points: Option<usize>,
    common: Common,
) -> Result<(), Failure> {
    let s = Settings::load(common)?;
    let out = s.out()?;
    let m = points.or(s.file.points).unwrap_or(100);
    let fitted: Box<dyn IntensityModel> = match (estimate, model) {
        (Some(path), None) => Box::new(EstimateFile::parse(&read(path)?)?),
        (None, Some(path)) => Box::new(ModelSpec::parse(&read(path)?)?),
        _ => return Err(Failure::Usage("give exactly one of --estimate or --model".into())),
    };
    let d = fitted.dim();
    let table = EventTable::parse(&read(events)?, d)?;
    if table.events.len() != d {
        return Err(Failure::Usage(format!(
            "event file has {} components, the model has {d}",
            table.events.len()
        )));
    }
    let horizon = s.c.horizon.unwrap_or_else(|| table.last_time());
    let stream = table.into_stream(horizon)?;
    let res = residual_transform(fitted.as_ref(), &stream)?;

    let mut report = QuantileReport { components: Vec::new() };
    println!("component  n  D  sqrt(n)*D  critical  p_value  verdict");
    for i in 0..d {
        let (quantiles, ks) = match (component_quantiles(&res, i, m), ks_test(&res, i)) {
            (Ok(q), Ok(ks)) => (q, ks),
            (Err(e), _) | (_, Err(e)) => {
                println!("{}  skipped: {e}", i + 1);
                continue;
            }
        };
        report.components.push(quantiles);
        println!(
            "{}  {}  {}  {}  {KS_CRITICAL_5}  {}  {}",
            i + 1,
            ks.n,
            ks.statistic,
            ks.scaled,
            ks.p_value,
            if ks.passes(0.05) { "pass" } else { "reject" }
        );
        if res.clamped_fraction[i] > 0.0 {
            println!("{}  clamped intensity fraction: {}", i + 1, res.clamped_fraction[i]);
        }
    }
    write(out, &report.to_csv())
}
