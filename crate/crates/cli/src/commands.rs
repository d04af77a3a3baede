use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime, Utc};
use semtwin::geo::{parse_wkt, Geometry};
use semtwin::ingest::{
    compile_rules_tagged, extract_document, instantiate_tagged, parse_extraction, parse_gazetteer, split, Gazetteer,
    ReplayClient,
};
use semtwin::layout::{
    generate_grid_layout, layout_to_graph, optimize as run_optimizer, read_layout_csv, row_deviation_stats,
    write_deviation_csv, write_layout_csv, write_trace_csv, Layout, OptConfig, TurbineSpec, WindRose,
};
use semtwin::metrics::{
    extraction_accuracy, krippendorff_alpha, parse_annotations_csv, write_match_report_csv, MatcherConfig,
};
use semtwin::rules::{parse_rules, reason_with_provenance, RuleSet};
use semtwin::storm::{
    find_track, parse_hurdat2, run_simulation, write_delta_log, write_timeline_csv, SimConfig, MS_TO_MPH,
};
use semtwin::term_graph::{parse_ntriples, serialize_ntriples, subsumption_closure, vocab, Graph, Ontology};

use crate::config::ScenarioConfig;
use crate::{CliError, Outcome};

pub struct Context {
    pub cfg: ScenarioConfig,
    pub verbose: bool,
}

impl Context {
    fn log(&self, msg: impl Display) {
        if self.verbose {
            eprintln!("{msg}");
        }
    }

    fn out_dir(&self) -> Result<PathBuf, CliError> {
        let dir = self.cfg.out_dir();
        fs::create_dir_all(&dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
        Ok(dir)
    }

    fn write(&self, dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        self.log(format_args!("wrote {}", path.display()));
        Ok(())
    }
}

fn domain(e: impl Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// A single file, or the sorted files with `ext` in a directory.
fn collect_files(path: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == ext))
        .collect();
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_ontology(cfg: &ScenarioConfig) -> Result<Ontology, CliError> {
    let mut ont = Ontology::core();
    if let Some(p) = cfg.path("paths.ontology") {
        let g = parse_ntriples(&read(&p)?).map_err(domain)?;
        ont.extend_from_graph(&g).map_err(domain)?;
    }
    Ok(ont)
}

fn load_boundary(cfg: &ScenarioConfig) -> Result<Geometry, CliError> {
    parse_wkt(read(&cfg.require_path("paths.boundary")?)?.trim()).map_err(domain)
}

fn load_rules(path: &Path) -> Result<RuleSet, CliError> {
    parse_rules(&read(path)?).map_err(domain)
}

/// Configured graph/rules file, or the matching `ingest` output.
fn input_or_output(ctx: &Context, key: &str, file: &str) -> Result<PathBuf, CliError> {
    let path = ctx.cfg.path(key).unwrap_or_else(|| ctx.cfg.out_dir().join(file));
    if !path.exists() {
        return Err(CliError::Usage(format!("`{key}` not set and {} does not exist; run ingest first", path.display())));
    }
    Ok(path)
}

pub fn ingest(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let docs = collect_files(&cfg.require_path("paths.documents")?, "txt")?;
    if docs.is_empty() {
        return Err(CliError::Usage("no .txt documents found".into()));
    }
    let client = ReplayClient::new(cfg.require_path("paths.replay")?);
    let gazetteer: Gazetteer = match cfg.path("paths.gazetteer") {
        Some(p) => parse_gazetteer(&read(&p)?).map_err(domain)?,
        None => Gazetteer::new(),
    };
    let ontology = load_ontology(cfg)?;

    let mut graph = Graph::new();
    let mut rules = RuleSet::default();
    let mut warnings = Vec::new();
    for path in &docs {
        let name = stem(path);
        ctx.log(format_args!("ingesting {}", path.display()));
        let text = read(path)?;
        let tag = (docs.len() > 1).then_some(name.as_str());
        let (doc, extract_warnings) =
            extract_document(&client, &text).map_err(|e| CliError::Domain(format!("{name}: {e}")))?;
        let g = instantiate_tagged(&doc, &ontology, tag).map_err(|e| CliError::Domain(format!("{name}: {e}")))?;
        let compiled = compile_rules_tagged(&doc, &gazetteer, tag);
        graph = graph.union(&g).union(&compiled.annotations);
        rules.extend(compiled.rules).map_err(|e| CliError::Domain(format!("{name}: {e}")))?;
        warnings.extend(extract_warnings.into_iter().chain(compiled.warnings).map(|w| format!("{name}: {w}")));
    }

    let out = ctx.out_dir()?;
    ctx.write(&out, "graph.nt", serialize_ntriples(&graph))?;
    ctx.write(&out, "rules.txt", format!("{rules}"))?;
    let mut w = warnings.join("\n");
    if !w.is_empty() {
        w.push('\n');
    }
    ctx.write(&out, "warnings.txt", w)?;
    println!("{} documents, {} triples, {} rules, {} warnings", docs.len(), graph.len(), rules.len(), warnings.len());
    Ok(Outcome::Ok)
}

pub fn reason(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let layout_path = cfg.require_path("paths.layout")?;
    let graph = parse_ntriples(&read(&input_or_output(ctx, "paths.graph", "graph.nt")?)?).map_err(domain)?;
    let rules = load_rules(&input_or_output(ctx, "paths.rules", "rules.txt")?)?;
    let layout = read_layout_csv(&read(&layout_path)?, None).map_err(domain)?;
    let ontology = load_ontology(cfg)?;

    let facts = subsumption_closure(&graph.union(&layout_to_graph(&layout)), &ontology).map_err(domain)?;
    let m = reason_with_provenance(&facts, &rules).map_err(domain)?;
    let conflicts = m.graph.find(None, Some(&vocab::violates()), None);

    let mut report = format!("{} conflicts\n", conflicts.len());
    for t in &conflicts {
        report.push_str(&format!("{} violates {}\n", t.subject, t.object));
        for step in m.explain(t).map_err(domain)? {
            report.push_str(&format!("  {step}\n"));
        }
    }
    print!("{report}");
    let out = ctx.out_dir()?;
    ctx.write(&out, "conflicts.txt", &report)?;
    Ok(if conflicts.is_empty() { Outcome::Ok } else { Outcome::Conflicts })
}

fn opt_config(cfg: &ScenarioConfig, boundary: Geometry) -> Result<OptConfig, CliError> {
    let d = OptConfig::new(boundary);
    Ok(OptConfig {
        iterations: cfg.get_or("opt.iterations", d.iterations)?,
        learning_rate: cfg.get_or("opt.learning_rate", d.learning_rate)?,
        learning_rate_final: cfg.get_or("opt.learning_rate_final", d.learning_rate_final)?,
        spacing_min: cfg.get_or("opt.spacing_min", d.spacing_min)?,
        spacing_weight: cfg.get_or("opt.spacing_weight", d.spacing_weight)?,
        boundary_weight: cfg.get_or("opt.boundary_weight", d.boundary_weight)?,
        seed: cfg.get_or("opt.seed", d.seed)?,
        sectors_per_iteration: cfg.get_or("opt.sectors_per_iteration", d.sectors_per_iteration)?,
        fd_step: cfg.get_or("opt.fd_step", d.fd_step)?,
        eval_every: cfg.get_or("opt.eval_every", d.eval_every)?,
        ..d
    })
}

fn grid_layout(cfg: &ScenarioConfig, boundary: &Geometry) -> Result<Layout, CliError> {
    let count = cfg.get_or("opt.turbines", 121usize)?;
    let rows = cfg.get_or("opt.rows", 13usize)?;
    let spacing = cfg.get_or("opt.spacing_min", 1200.0)?;
    generate_grid_layout(boundary, rows, count, spacing).map_err(domain)
}

pub fn optimize(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let boundary = load_boundary(cfg)?;
    let opt = opt_config(cfg, boundary.clone())?;
    let rose = WindRose::uniform(cfg.get_or("opt.weibull_k", 2.5)?, cfg.get_or("opt.weibull_a", 8.0)?).map_err(domain)?;
    let spec = TurbineSpec::iea_15mw();
    let initial = grid_layout(cfg, &boundary)?;
    ctx.log(format_args!("optimizing {} turbines for {} iterations", initial.len(), opt.iterations));
    let res = run_optimizer(&initial, &rose, &spec, &opt).map_err(domain)?;

    let out = ctx.out_dir()?;
    ctx.write(&out, "layout_initial.csv", write_layout_csv(&initial).map_err(domain)?)?;
    ctx.write(&out, "layout.csv", write_layout_csv(&res.layout).map_err(domain)?)?;
    ctx.write(&out, "trace.csv", write_trace_csv(&res.trace))?;
    if let Some(p) = cfg.path("paths.reference_layout") {
        let reference = read_layout_csv(&read(&p)?, Some(res.layout.anchor)).map_err(domain)?;
        let rows = res.layout.rows.clone().unwrap_or_else(|| vec![1; res.layout.len()]);
        let report = row_deviation_stats(&res.layout, &reference, &rows).map_err(domain)?;
        ctx.write(&out, "deviation.csv", write_deviation_csv(&report))?;
    }
    println!(
        "aep_initial_gwh={:.3} aep_final_gwh={:.3} min_spacing_m={:.1} feasible={}",
        res.aep_initial,
        res.aep_final,
        res.layout.min_spacing(),
        res.feasible
    );
    if res.feasible {
        Ok(Outcome::Ok)
    } else {
        eprintln!("error: no feasible layout found");
        Ok(Outcome::Infeasible)
    }
}

fn parse_time(key: &str, s: &str) -> Result<DateTime<Utc>, CliError> {
    let s = s.trim();
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M").map(|t| t.and_utc()))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M").map(|t| t.and_utc()))
        .map_err(|_| CliError::Usage(format!("`{key}` = `{s}` is not a UTC timestamp")))
}

fn sim_config(cfg: &ScenarioConfig) -> Result<SimConfig, CliError> {
    let d = SimConfig::default();
    Ok(SimConfig {
        hub_height: cfg.get_or("sim.hub_height", d.hub_height)?,
        ref_height: cfg.get_or("sim.ref_height", d.ref_height)?,
        cutout: cfg.get_or("sim.cutout", d.cutout)?,
        holland_b: cfg.get_or("sim.holland_b", d.holland_b)?,
        rmax_km: cfg.get_or("sim.rmax_km", d.rmax_km)?,
        shear_alpha: cfg.get_or("sim.shear_alpha", d.shear_alpha)?,
        proximity_km: cfg.get_or("sim.proximity_km", d.proximity_km)?,
        timestep_min: cfg.get_or("sim.timestep_min", d.timestep_min)?,
        hysteresis: cfg.get_or("sim.hysteresis", d.hysteresis)?,
        cyclonic_offset: cfg.get_or("sim.cyclonic_offset", d.cyclonic_offset)?,
    })
}

fn fmt_time(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let sim = sim_config(cfg)?;
    let tracks = parse_hurdat2(&read(&cfg.require_path("paths.hurdat2")?)?).map_err(domain)?;
    let id = cfg.raw("sim.storm_id").ok_or_else(|| CliError::Usage("missing required setting `sim.storm_id`".into()))?;
    let track = find_track(&tracks, id.trim()).map_err(domain)?;
    let (first, last) = match (track.records.first(), track.records.last()) {
        (Some(a), Some(b)) => (a.time, b.time),
        _ => return Err(CliError::Domain(format!("storm {id} has no records"))),
    };
    let start = cfg.raw("sim.start").map(|s| parse_time("sim.start", s)).transpose()?.unwrap_or(first);
    let end = cfg.raw("sim.end").map(|s| parse_time("sim.end", s)).transpose()?.unwrap_or(last);

    let layout = match cfg.path("paths.layout") {
        Some(p) => read_layout_csv(&read(&p)?, None).map_err(domain)?,
        None if cfg.path("paths.boundary").is_some() => grid_layout(cfg, &load_boundary(cfg)?)?,
        None => return Err(CliError::Usage("simulate needs `paths.layout` or `paths.boundary`".into())),
    };
    let rules = match cfg.path("paths.rules") {
        Some(p) => load_rules(&p)?,
        None => RuleSet::default(),
    };
    ctx.log(format_args!("simulating {} turbines from {} to {}", layout.len(), fmt_time(start), fmt_time(end)));
    let timeline = run_simulation(&layout_to_graph(&layout), track, &sim, &rules, start, end).map_err(domain)?;

    let out = ctx.out_dir()?;
    let mut csv = Vec::new();
    write_timeline_csv(&timeline, &mut csv).map_err(domain)?;
    ctx.write(&out, "timeline.csv", csv)?;
    let mut deltas = Vec::new();
    write_delta_log(&timeline, &mut deltas).map_err(domain)?;
    ctx.write(&out, "deltas.nt", deltas)?;

    let mut track_csv = String::from("time_utc,lat,lon,vmax_ms,vmax_mph,parked\n");
    for s in &timeline.snapshots {
        let parked = s.states.iter().filter(|st| st.status == semtwin::storm::TurbineStatus::Parked).count();
        track_csv.push_str(&format!(
            "{},{:.4},{:.4},{:.3},{:.1},{parked}\n",
            fmt_time(s.time),
            s.storm.position.lat,
            s.storm.position.lon,
            s.storm.vmax,
            s.storm.vmax * MS_TO_MPH
        ));
    }
    ctx.write(&out, "storm_track.csv", track_csv)?;
    ctx.write(&out, "turbines.csv", write_layout_csv(&layout).map_err(domain)?)?;

    let s = timeline.summary();
    let opt_time = |t: Option<DateTime<Utc>>| t.map(fmt_time).unwrap_or_else(|| "none".into());
    let (shutdowns, recoveries) =
        s.transitions.values().fold((0, 0), |(a, b), &(x, y)| (a + x, b + y));
    let summary = format!(
        "storm={}\nsteps={}\nturbines={}\nfirst_shutdown={}\nrecovery={}\nmin_distance_km={}\nmin_distance_time={}\nmax_hub_wind_ms={:.3}\nshutdowns={shutdowns}\nrecoveries={recoveries}\n",
        track.header.id,
        timeline.snapshots.len(),
        layout.len(),
        opt_time(s.first_shutdown),
        opt_time(s.recovery),
        if s.min_distance_km.is_finite() { format!("{:.3}", s.min_distance_km) } else { "none".into() },
        opt_time(s.min_distance_time),
        s.max_hub_wind,
    );
    print!("{summary}");
    ctx.write(&out, "summary.txt", summary)?;
    Ok(Outcome::Ok)
}

fn constraints_of(path: &Path) -> Result<Vec<semtwin::ingest::ConstraintSnippet>, CliError> {
    let (doc, _) = parse_extraction(&read(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    Ok(split(&doc).1)
}

pub fn eval(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.cfg;
    let annotations = cfg.path("paths.annotations");
    let pair = (cfg.path("paths.extracted"), cfg.path("paths.ground_truth"));
    if annotations.is_none() && pair.0.is_none() && pair.1.is_none() {
        return Err(CliError::Usage("eval needs `paths.annotations` or `paths.extracted` with `paths.ground_truth`".into()));
    }
    let out = ctx.out_dir()?;

    if let Some(p) = annotations {
        let set = parse_annotations_csv(&read(&p)?).map_err(domain)?;
        let alpha = krippendorff_alpha(&set).map_err(domain)?;
        println!("alpha={alpha:.4} items={}", set.len());
        ctx.write(&out, "alpha.csv", format!("items,alpha\n{},{alpha:.4}\n", set.len()))?;
    }

    match pair {
        (None, None) => {}
        (Some(ext), Some(gt)) => {
            let matcher = MatcherConfig { threshold: cfg.get_or("eval.threshold", MatcherConfig::default().threshold)? };
            let ext_files = collect_files(&ext, "json")?;
            let gt_files = collect_files(&gt, "json")?;
            let pairs: Vec<(String, PathBuf, PathBuf)> = if ext.is_file() && gt.is_file() {
                let name = cfg.raw("eval.document").map(str::to_string).unwrap_or_else(|| stem(&gt));
                vec![(name, ext.clone(), gt.clone())]
            } else {
                let mut v = Vec::new();
                for g in &gt_files {
                    let name = g.file_name().expect("file");
                    let e = ext_files
                        .iter()
                        .find(|e| e.file_name() == Some(name))
                        .ok_or_else(|| CliError::Usage(format!("no extraction for {}", g.display())))?;
                    v.push((stem(g), e.clone(), g.clone()));
                }
                v
            };
            if pairs.is_empty() {
                return Err(CliError::Usage("no ground-truth files found".into()));
            }
            let mut rows = Vec::new();
            for (name, e, g) in pairs {
                let report = extraction_accuracy(&constraints_of(&e)?, &constraints_of(&g)?, &matcher).map_err(domain)?;
                println!("{}", report.table_row(&name));
                rows.push((name, report));
            }
            ctx.write(&out, "accuracy.csv", write_match_report_csv(&rows))?;
        }
        _ => return Err(CliError::Usage("`paths.extracted` and `paths.ground_truth` go together".into())),
    }
    Ok(Outcome::Ok)
}
