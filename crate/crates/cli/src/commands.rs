use std::fs;
use std::path::Path;

use nettomo::expander::{
    certify_1_identifiable, k_identifiable, ExpanderCertificate, KCheck, MAX_EXHAUSTIVE_LEFT,
};
use nettomo::lp::IlpOptions;
use nettomo::netgraph::io::{format_graph, parse_graph, parse_routing, routing_to_json};
use nettomo::netgraph::{build_routing_matrix, Network, RoutingMatrix};
use nettomo::pathsel::{
    cover_ilp_with, identifiability_heuristic, identifiability_ilp_with, verify_selection,
    IdentOptions,
};
use nettomo::sim::{
    run_identifiability_survey, run_minpath_survey, run_recovery_experiment, SimConfig,
};
use nettomo::tomo::{estimate_delays_with, parse_vector, SignModel};
use nettomo::topogen::{generate_topology, prune, shortest_path_routing, TopoConfig};
use serde::Serialize;

use crate::error::CliError;
use crate::output::Output;
use crate::{
    CheckArgs, Command, EstimateArgs, GenArgs, Method, MinpathsArgs, RoutesArgs, SimArgs,
    SurveyKind,
};

pub fn run(command: Command) -> Result<Vec<Output>, CliError> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Routes(a) => routes(a),
        Command::Check(a) => check(a),
        Command::Estimate(a) => estimate(a),
        Command::Minpaths(a) => minpaths(a),
        Command::Survey(a) => survey(a.sim, a.kind),
        Command::Recover(a) => recover(a.sim),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load<T, E: Into<CliError>>(
    path: &Path,
    parse: impl FnOnce(&str) -> Result<T, E>,
) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|e| e.into().in_file(path))
}

fn read_network(path: &Path) -> Result<Network, CliError> {
    load(path, parse_graph)
}

fn read_routing(path: &Path) -> Result<RoutingMatrix, CliError> {
    load(path, parse_routing)
}

fn gen(a: GenArgs) -> Result<Vec<Output>, CliError> {
    let config = TopoConfig {
        nodes: a.nodes,
        exponent: a.exponent,
        boundary: a.boundary,
        seed: a.seed,
    };
    let net = generate_topology(&config)?;
    Ok(vec![Output::new(a.output, format_graph(&net))])
}

fn routes(a: RoutesArgs) -> Result<Vec<Output>, CliError> {
    let net = read_network(&a.input)?;
    let paths = shortest_path_routing(&net)?;
    if !a.prune {
        let routing = build_routing_matrix(&net, &paths)?;
        return Ok(vec![Output::new(a.output, routing_to_json(&routing))]);
    }
    let inst = prune(&net, &paths)?;
    let mut out = vec![Output::new(a.output, routing_to_json(&inst.routing))];
    if let Some(p) = a.graph_out {
        out.push(Output::new(Some(p), format_graph(&inst.network)));
    }
    if let Some(p) = a.log {
        out.push(Output::new(Some(p), inst.provenance_json()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct CheckOutput {
    #[serde(flatten)]
    certificate: ExpanderCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive: Option<ExhaustiveOutput>,
}

#[derive(Serialize)]
struct ExhaustiveOutput {
    k: usize,
    result: KCheck,
}

fn check(a: CheckArgs) -> Result<Vec<Output>, CliError> {
    let routing = read_routing(&a.input)?;
    let certificate = certify_1_identifiable(&routing)?;
    let exhaustive = if a.exhaustive {
        let k = a.k as usize;
        let result = k_identifiable(&routing, k)?;
        if result == KCheck::Skipped {
            return Err(CliError::SizeGuard(format!(
                "a degree class exceeds the exhaustive-check limit of {MAX_EXHAUSTIVE_LEFT} links"
            )));
        }
        Some(ExhaustiveOutput { k, result })
    } else {
        None
    };
    let mut text = serde_json::to_string(&CheckOutput {
        certificate,
        exhaustive,
    })
    .expect("serializable");
    text.push('\n');
    Ok(vec![Output::new(a.output, text)])
}

fn estimate(a: EstimateArgs) -> Result<Vec<Output>, CliError> {
    let routing = read_routing(&a.input)?;
    let y = load(&a.measurements, |t| parse_vector(t, "y"))?;
    let model = if a.signed {
        SignModel::Signed
    } else {
        SignModel::Nonnegative
    };
    let est = estimate_delays_with(&routing, &y, model)?;
    Ok(vec![Output::new(a.output, est.to_json())])
}

fn minpaths(a: MinpathsArgs) -> Result<Vec<Output>, CliError> {
    let routing = read_routing(&a.input)?;
    let sel = match a.method {
        Method::Cover => cover_ilp_with(
            &routing,
            &IlpOptions {
                node_limit: a.node_limit,
            },
        )?,
        Method::Ilp => identifiability_ilp_with(
            &routing,
            &IdentOptions {
                node_limit: a.node_limit,
                ..IdentOptions::default()
            },
        )?,
        Method::Heuristic => {
            identifiability_heuristic(&routing, a.max_rounds.unwrap_or(routing.path_count()))?
        }
    };
    let check = verify_selection(&routing, &sel)?;
    Ok(vec![Output::new(
        a.output,
        sel.to_json(check.certificate.as_ref()),
    )])
}

fn sim_config(a: &SimArgs) -> Result<SimConfig, CliError> {
    let mut config = load(&a.config, SimConfig::from_json)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn report_outputs(a: SimArgs, csv: String, json: String, plot: String) -> Vec<Output> {
    let mut out = vec![Output::new(a.output, csv)];
    if let Some(p) = a.json {
        out.push(Output::new(Some(p), json));
    }
    if let Some(p) = a.plot {
        out.push(Output::new(Some(p), plot));
    }
    out
}

fn survey(a: SimArgs, kind: SurveyKind) -> Result<Vec<Output>, CliError> {
    let config = sim_config(&a)?;
    let jobs = a.jobs as usize;
    Ok(match kind {
        SurveyKind::Identifiability => {
            let r = run_identifiability_survey(&config, jobs)?;
            report_outputs(a, r.to_csv(), r.to_json(), r.plot_csv())
        }
        SurveyKind::Minpaths => {
            let h = run_minpath_survey(&config, jobs)?;
            let csv = h.to_csv();
            report_outputs(a, csv.clone(), h.to_json(), csv)
        }
    })
}

fn recover(a: SimArgs) -> Result<Vec<Output>, CliError> {
    let config = sim_config(&a)?;
    let r = run_recovery_experiment(&config, a.jobs as usize)?;
    Ok(report_outputs(a, r.to_csv(), r.to_json(), r.plot_csv()))
}
