use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use solvable_walks::acceptance::{self, CRITERIA};
use solvable_walks::asymptotics::{
    dirichlet_lambda1, gamma_from_volume, log_grid, Profile, VolumeFunction,
};
use solvable_walks::exclusive::{check_exclusive as check, make_hm, ExclusiveCandidate, Verdict};
use solvable_walks::fox::{flow_of_word, magnus_embed, words_equal_mod_nn, Flow};
use solvable_walks::group::ball as ball_layers;
use solvable_walks::measures::{
    mc_return_probability, return_probabilities, with_threads, ConvolutionOptions,
};
use solvable_walks::scalar::Probability;
use solvable_walks::{Element, MarkedGroup, ReducedWord};

use crate::failure::usage;
use crate::measure::MeasureChoice;
use crate::output::{csv_table, json_rows, Report, Status};
use crate::{
    BallArgs, CurvesArgs, DirichletArgs, ExclusiveArgs, GammaArgs, ReturnProbArgs, SelftestArgs,
    WordArgs, WordProblemArgs,
};

fn group(spec: &str) -> anyhow::Result<MarkedGroup> {
    Ok(spec.parse()?)
}

fn word(text: &str, group: &MarkedGroup) -> anyhow::Result<ReducedWord> {
    Ok(ReducedWord::parse(text, group.rank())?)
}

fn element_text(x: &Element) -> String {
    x.to_json().to_string()
}

fn integer(c: &BigInt) -> Value {
    c.to_i64().map_or_else(|| c.to_string().into(), Value::from)
}

/// `A:B:STEPS`, geometrically spaced.
fn grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let bad = || {
        usage(format!(
            "expected a grid A:B:STEPS with 0 < A ≤ B, got '{text}'"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || steps == 0 {
        return Err(bad());
    }
    Ok(if steps == 1 {
        vec![lo]
    } else {
        log_grid(lo, hi, steps)
    })
}

/// `N` or `A:B`.
fn step_range(text: &str) -> anyhow::Result<(usize, usize)> {
    let bad = || {
        usage(format!(
            "expected a step count N or a range A:B, got '{text}'"
        ))
    };
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => {
            let n = parse(text)?;
            Ok((n, n))
        }
    }
}

/// Shortest round-trip form, switching to exponent notation for tiny or
/// huge magnitudes.
fn number(x: f64) -> String {
    format!("{x:?}")
}

pub fn embed(args: &WordArgs) -> anyhow::Result<Report> {
    let group = group(&args.group)?;
    let w = word(&args.word, &group)?;
    let image = magnus_embed::<BigInt>(&w, &group)?;
    let mut text = String::new();
    let mut entries = Vec::new();
    for (key, vector) in image.a.entries() {
        let cells: Vec<String> = vector.iter().map(ToString::to_string).collect();
        writeln!(text, "{} ({})", element_text(key), cells.join(", "))?;
        entries.push(json!({
            "key": key.to_json(),
            "vector": vector.iter().map(integer).collect::<Vec<_>>(),
        }));
    }
    writeln!(text, "base {}", element_text(&image.base))?;
    Ok(Report::new(
        "embed",
        text,
        json!({"a": entries, "base": image.base.to_json()}),
    ))
}

fn flow_json(flow: &Flow) -> Value {
    flow.edges()
        .map(|(vertex, generator, value)| {
            json!({"vertex": vertex.to_json(), "gen": generator + 1, "value": integer(value)})
        })
        .collect::<Vec<_>>()
        .into()
}

pub fn flow(args: &WordArgs) -> anyhow::Result<Report> {
    let group = group(&args.group)?;
    let w = word(&args.word, &group)?;
    let flow = flow_of_word::<BigInt>(&w, &group)?;
    let circulation = flow.net_flow(&group).is_circulation();
    let mut text = String::new();
    for (vertex, generator, value) in flow.edges() {
        writeln!(text, "{} s{} {value}", element_text(vertex), generator + 1)?;
    }
    writeln!(text, "circulation {circulation}")?;
    Ok(Report::new(
        "flow",
        text,
        json!({"edges": flow_json(&flow), "circulation": circulation}),
    ))
}

pub fn word_problem(args: &WordProblemArgs) -> anyhow::Result<Report> {
    let group = group(&args.group)?;
    let (u, v) = (word(&args.u, &group)?, word(&args.v, &group)?);
    let equal = words_equal_mod_nn(&u, &v, &group)?;
    Ok(Report::new(
        "wp",
        if equal { "EQUAL" } else { "DISTINCT" }.to_string(),
        json!({"equal": equal, "u": u.to_string(), "v": v.to_string()}),
    ))
}

pub fn return_prob(args: &ReturnProbArgs) -> anyhow::Result<Report> {
    if !args.exact && !args.mc {
        return Err(usage("return-prob needs --exact, --mc or both"));
    }
    let seed = match (args.mc, args.seed) {
        (true, None) => return Err(usage("--mc needs an explicit --seed")),
        (_, seed) => seed,
    };
    let group = group(&args.group)?;
    let choice: MeasureChoice = args.measure.parse()?;
    let (first, last) = step_range(&args.n)?;
    let exact: Option<Vec<BigRational>> = if args.exact {
        let spec = choice.exact(&group)?;
        let options = ConvolutionOptions {
            budget: args.budget,
            mass_floor: 0.0,
        };
        Some(return_probabilities(&spec, last, options)?)
    } else {
        None
    };
    let header = ["n", "exact", "estimate", "ci_lo", "ci_hi", "trials", "seed"];
    let mut rows = Vec::new();
    let float_spec = if args.mc {
        Some(choice.float(&group)?)
    } else {
        None
    };
    let threads = crate::threads()?;
    let mut single = Vec::new();
    for n in first..=last {
        let exact_cell = exact.as_ref().map(|values| values[n].render());
        let mut row = vec![n.to_string(), exact_cell.clone().unwrap_or_default()];
        match (&float_spec, seed) {
            (Some(spec), Some(seed)) => {
                let estimate = with_threads(threads, || {
                    mc_return_probability(spec, n, args.trials, seed)
                })??;
                row.extend([
                    number(estimate.estimate),
                    number(estimate.ci_low),
                    number(estimate.ci_high),
                    args.trials.to_string(),
                    seed.to_string(),
                ]);
                single = vec![format!(
                    "{} [{}, {}]",
                    estimate.estimate, estimate.ci_low, estimate.ci_high
                )];
            }
            _ => row.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]),
        }
        if let Some(exact_cell) = exact_cell {
            single.insert(0, exact_cell);
        }
        rows.push(row);
    }
    let text = if first == last && !args.csv {
        single.join("\n")
    } else {
        csv_table(&header, &rows)?
    };
    Ok(Report::new(
        "return-prob",
        text,
        json!({
            "group": args.group,
            "measure": args.measure,
            "rows": json_rows(&header, &rows),
        }),
    ))
}

pub fn check_exclusive(args: &ExclusiveArgs) -> anyhow::Result<Report> {
    let group = group(&args.group)?;
    let gamma = args
        .gamma
        .split(';')
        .map(|w| word(w, &group))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rho = word(&args.rho, &group)?;
    let moduli = args
        .m
        .as_deref()
        .map(|text| {
            text.split(',')
                .map(|m| {
                    m.trim()
                        .parse::<u64>()
                        .map_err(|_| usage(format!("bad modulus '{m}' in --m")))
                })
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .transpose()?;
    let predicate = match (&args.predicate, &moduli) {
        (Some(name), _) => name.clone(),
        (None, Some(moduli)) => make_hm(&group, moduli)?
            .predicate
            .unwrap_or_else(|| "full".to_string()),
        (None, None) => "full".to_string(),
    };
    let mut candidate =
        ExclusiveCandidate::new(group.clone(), gamma, rho, args.split_at, &predicate)?;
    if let Some(moduli) = moduli {
        candidate = candidate.with_moduli(moduli)?;
    }
    if let Some(radius) = args.radius {
        candidate = candidate.with_radius(radius);
    }
    if let Some(budget) = args.budget {
        candidate = candidate.with_budget(budget);
    }
    let report = check(&candidate)?;
    let mut text = String::new();
    let (vertex, s) = &report.edge;
    writeln!(
        text,
        "edge {} s{} carries flow {}",
        element_text(vertex),
        s + 1,
        report.edge_flow
    )?;
    writeln!(text, "condition 1: {}", report.condition1)?;
    match &report.condition2.witness {
        Some((x, x_word, value)) => writeln!(
            text,
            "condition 2: {} (witness x = {} = {x_word}, flow {value})",
            report.condition2.verdict,
            element_text(x)
        )?,
        None => writeln!(
            text,
            "condition 2: {} ({} candidates, predicate {predicate})",
            report.condition2.verdict, report.condition2.candidates
        )?,
    }
    writeln!(
        text,
        "condition 3: {} via {}",
        report.condition3.verdict, report.condition3.method
    )?;
    let summary = if report.certifies_exclusive() {
        "exclusive"
    } else if report.all_hold() {
        "exclusive up to the search radius"
    } else if report.condition3.verdict == Verdict::Unknown {
        "unknown: search budget exhausted"
    } else {
        "not exclusive"
    };
    writeln!(text, "{summary}")?;
    let status = if report.condition3.verdict == Verdict::Unknown {
        Status::BudgetExhausted
    } else {
        Status::Ok
    };
    Ok(Report::new("check-exclusive", text, report.to_json(&group)).with_status(status))
}

pub fn curves(args: &CurvesArgs) -> anyhow::Result<Report> {
    let params = args
        .params
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad parameter '{p}'")))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let profile = Profile::from_family(&args.family, &params)?;
    let header = ["n", "exponent", "value"];
    let rows = grid(&args.n_grid)?
        .into_iter()
        .map(|n| {
            let point = profile.evaluate(n)?;
            Ok(vec![number(n), number(point.exponent), number(point.value)])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Report::new(
        "curves",
        csv_table(&header, &rows)?,
        json!({"profile": profile.to_string(), "rows": json_rows(&header, &rows)}),
    ))
}

pub fn gamma(args: &GammaArgs) -> anyhow::Result<Report> {
    let volume: VolumeFunction = args.volume.parse()?;
    let header = ["t", "argument", "log_gamma", "gamma"];
    let rows = grid(&args.t_grid)?
        .into_iter()
        .map(|t| {
            let value = gamma_from_volume(&volume, t)?;
            Ok(vec![
                number(t),
                number(value.argument),
                number(value.log_gamma),
                number(value.gamma),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Report::new(
        "gamma",
        csv_table(&header, &rows)?,
        json!({"volume": volume.to_string(), "rows": json_rows(&header, &rows)}),
    ))
}

pub fn ball(args: &BallArgs) -> anyhow::Result<Report> {
    let group = group(&args.group)?;
    let layers = ball_layers(&group, args.radius, args.budget)?;
    let header = ["radius", "sphere", "ball"];
    let rows: Vec<Vec<String>> = layers
        .iter()
        .map(|layer| {
            vec![
                layer.radius.to_string(),
                layer.frontier.len().to_string(),
                layer.ball_size.to_string(),
            ]
        })
        .collect();
    Ok(Report::new(
        "ball",
        csv_table(&header, &rows)?,
        json!({"group": args.group, "rows": json_rows(&header, &rows)}),
    ))
}

pub fn dirichlet(args: &DirichletArgs) -> anyhow::Result<Report> {
    let group = group(&args.group)?;
    let spec = args.measure.parse::<MeasureChoice>()?.float(&group)?;
    let omega: Vec<Element> = if args.coordinate_box {
        if !group.is_standard_free_abelian() {
            return Err(usage("--box needs a free abelian group zr:R"));
        }
        let radius = i64::try_from(args.radius).map_err(|_| usage("radius too large"))?;
        let mut points = vec![Vec::new()];
        for _ in 0..group.rank() {
            points = points
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (-radius..=radius).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        points.into_iter().map(Element::vector).collect()
    } else {
        ball_layers(&group, args.radius, args.budget)?
            .into_iter()
            .flat_map(|layer| layer.frontier)
            .collect()
    };
    let report = dirichlet_lambda1(&spec, &omega, args.budget)?;
    let text = format!(
        "size {}\nlambda1 {}\ntest_function_bound {}\niterations {}\n",
        report.size, report.lambda1, report.test_function_bound, report.iterations
    );
    Ok(Report::new(
        "dirichlet",
        text,
        json!({
            "size": report.size,
            "lambda1": report.lambda1,
            "test_function_bound": report.test_function_bound,
            "iterations": report.iterations,
        }),
    ))
}

pub fn selftest(args: &SelftestArgs) -> anyhow::Result<Report> {
    let selected: Vec<_> = match args.criterion {
        Some(id) => vec![acceptance::find(id).ok_or_else(|| {
            usage(format!(
                "criteria are numbered 1 to {}, got {id}",
                CRITERIA.len()
            ))
        })?],
        None => CRITERIA.iter().collect(),
    };
    let outcomes: Vec<_> = selected.iter().map(|c| c.run()).collect();
    let text = outcomes
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n");
    let json: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "id": o.id,
                "name": o.name,
                "passed": o.passed,
                "detail": o.detail,
                "limit_seconds": o.limit.as_secs(),
            })
        })
        .collect();
    let status = if outcomes.iter().all(|o| o.passed) {
        Status::Ok
    } else {
        Status::SelftestFailed
    };
    Ok(Report::new("selftest", text, json!({"criteria": json})).with_status(status))
}
