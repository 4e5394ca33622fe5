use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use vlogic::assoc::{best_match, diagnose, feasible_mask, AssociativeTable, DiagnosisMode, TernaryTable};
use vlogic::cover::{
    build_repair_table, exact_cover_oracle, greedy_cover, repair_plan, CoverError, PlanVerdict, RepairInstance,
    RepairPlan, Spare, ORACLE_MAX_ROWS,
};
use vlogic::dq::{design_quality, DesignQualityInput};
use vlogic::lamp::{assemble, run_grid, run_sequencer, GridState, Program, Reg, SequencerState, GRID_SIDE};
use vlogic::metric::{fraction, quality_arith};
use vlogic::vlcore::{classify_interaction, BitVector, TernaryVector};

use crate::report::Report;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_table(path: &Path, text: &str) -> Result<AssociativeTable> {
    text.parse().with_context(|| format!("{}", path.display()))
}

pub fn query(argv: &[String], table_path: &Path, query: &str) -> Result<Report> {
    let text = read(table_path)?;
    let mut report = Report::new(argv, &[text.as_bytes(), query.as_bytes()]);
    if query.contains(['x', 'X']) {
        let table: TernaryTable = text.parse().with_context(|| format!("{}", table_path.display()))?;
        ternary_query(&mut report, &table, query)?;
        return Ok(report);
    }
    match text.parse::<AssociativeTable>() {
        Ok(table) => binary_query(&mut report, &table, query)?,
        Err(binary_err) => match text.parse::<TernaryTable>() {
            Ok(table) => ternary_query(&mut report, &table, query)?,
            Err(_) => return Err(anyhow!(binary_err).context(format!("{}", table_path.display()))),
        },
    }
    Ok(report)
}

fn binary_query(report: &mut Report, table: &AssociativeTable, query: &str) -> Result<()> {
    let query: BitVector = query.parse().context("query")?;
    let mask = feasible_mask(table, &query).context("query width")?;
    let best = best_match(&query, table)?;
    let names = |pred: bool| -> Vec<String> {
        (0..table.height())
            .filter(|&i| mask.get(i) != pred)
            .map(|i| table.row_name(i))
            .collect()
    };
    report.put("mode", "binary");
    report.put("query", query.to_string());
    report.put("mask", mask.to_string());
    report.list("feasible", names(true));
    report.list("contradictory", names(false));
    report.list("best", best.rows.iter().map(|&i| table.row_name(i)));
    report.put("quality", best.quality.to_string());
    report.put("compacted", best.quality.compacted.to_string());
    Ok(())
}

fn ternary_query(report: &mut Report, table: &TernaryTable, query: &str) -> Result<()> {
    let query: TernaryVector = query.parse().context("query")?;
    let mut scored = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let q = quality_arith(&query, row).context("query width")?;
        scored.push((classify_interaction(&query, row)?, q.q));
    }
    let top = scored.iter().map(|(_, q)| q).max().expect("tables have rows").clone();
    report.put("mode", "ternary");
    report.put("query", query.to_string());
    for (i, (kind, q)) in scored.iter().enumerate() {
        report.put(format!("row.{}", table.row_name(i)), format!("{kind} {}", fraction(q)));
    }
    report.list(
        "best",
        (0..scored.len()).filter(|&i| scored[i].1 == top).map(|i| table.row_name(i)),
    );
    report.put("quality", fraction(&top));
    Ok(())
}

pub fn diagnose_cmd(argv: &[String], table_path: &Path, response: &str, mode: DiagnosisMode) -> Result<Report> {
    let text = read(table_path)?;
    let mut report = Report::new(argv, &[text.as_bytes(), response.as_bytes(), mode.to_string().as_bytes()]);
    let table = parse_table(table_path, &text)?;
    let response: BitVector = response.parse().context("response")?;
    let result = diagnose(&table, &response, mode).context("response length must equal the number of tests")?;
    report.put("mode", mode.to_string());
    report.put("response", response.to_string());
    report.put("candidates", result.candidates.to_string());
    report.list("faults", result.candidates.ones_positions().map(|j| table.col_name(j)));
    report.put("consistent", result.consistent);
    if response.is_zero() {
        report.put("note", "no failing test");
    } else if !result.consistent {
        report.fail("inconsistent diagnosis");
    }
    Ok(report)
}

fn put_plan(report: &mut Report, plan: &RepairPlan, source: &str) {
    let verdict = match &plan.verdict {
        PlanVerdict::Valid => "valid".to_string(),
        PlanVerdict::NotCovering { uncovered } => {
            let cells: Vec<String> = uncovered.iter().map(|(r, c)| format!("F{r},{c}")).collect();
            format!("not covering ({})", cells.join(" "))
        }
        PlanVerdict::BudgetExceeded { .. } => "budget exceeded".to_string(),
    };
    report.put("plan", verdict);
    report.put("plan.source", source);
    report.list("plan.spares", plan.spares.iter().map(Spare::to_string));
    report.put("plan.rows", format!("{}/{}", plan.rows_used(), plan.budget.rows));
    report.put("plan.cols", format!("{}/{}", plan.cols_used(), plan.budget.cols));
    report.list("plan.remap", plan.remap.iter().map(|r| r.to_string()));
}

fn spares_of(labels: impl IntoIterator<Item = String>) -> Vec<Spare> {
    labels
        .into_iter()
        .map(|l| l.parse().expect("repair tables are labelled with spares"))
        .collect()
}

pub fn repair(argv: &[String], instance_path: &Path, oracle: bool) -> Result<Report> {
    let text = read(instance_path)?;
    let mut report = Report::new(argv, &[text.as_bytes(), &[u8::from(oracle)]]);
    let instance: RepairInstance = text.parse().with_context(|| format!("{}", instance_path.display()))?;
    report.put("memory", format!("{}x{}", instance.rows, instance.cols));
    report.put("budget", format!("rows {} cols {}", instance.budget.rows, instance.budget.cols));
    report.put("faults", instance.faults().len());
    if instance.faults().is_empty() {
        report.put("note", "nothing to repair");
        return Ok(report);
    }

    let coverage = build_repair_table(&instance)?;
    let table = &coverage.table;
    let greedy = greedy_cover(&coverage);
    let chosen: Vec<String> = greedy.chosen_rows().into_iter().map(|i| table.row_name(i)).collect();
    report.list("spares", (0..table.height()).map(|i| table.row_name(i)));
    report.put("m_a", greedy.selection.to_string());
    report.list("cover", chosen.clone());
    let plan = repair_plan(&instance, &spares_of(chosen.clone()))?;

    let need_oracle = oracle || !plan.is_valid();
    let covers = if !need_oracle {
        None
    } else if table.height() > ORACLE_MAX_ROWS {
        report.put(
            "oracle",
            format!("skipped: {} spares exceed the exact-search limit of {ORACLE_MAX_ROWS}", table.height()),
        );
        None
    } else {
        match exact_cover_oracle(&coverage) {
            Ok(covers) => Some(covers),
            Err(CoverError::Infeasible) => {
                report.put("oracle", "no cover within budget");
                Some(Vec::new())
            }
            Err(e) => return Err(e.into()),
        }
    };

    if let Some(covers) = &covers {
        if let Some(first) = covers.first() {
            let size = first.len();
            report.put("oracle.size", size);
            for (k, cover) in covers.iter().enumerate() {
                let names: Vec<String> = cover.iter().map(|&i| table.row_name(i)).collect();
                report.put(format!("oracle.cover.{}", k + 1), names.join(" "));
            }
            let ratio = chosen.len() as f64 / size as f64;
            report.put("ratio", format!("{}/{} = {ratio:.3}", chosen.len(), size));
            report.put("minimal", chosen.len() == size);
        }
    }

    if plan.is_valid() {
        put_plan(&mut report, &plan, "greedy");
        return Ok(report);
    }
    match covers.as_ref().and_then(|c| c.first()) {
        Some(best) => {
            let labels = best.iter().map(|&i| table.row_name(i));
            let fallback = repair_plan(&instance, &spares_of(labels))?;
            put_plan(&mut report, &fallback, "oracle");
        }
        None => {
            put_plan(&mut report, &plan, "greedy");
            report.fail("NotRepairable");
        }
    }
    Ok(report)
}

fn put_regs(report: &mut Report, prefix: &str, state: &SequencerState, dots: bool) {
    report.put(format!("{prefix}steps"), state.steps);
    report.put(format!("{prefix}halted"), state.halted);
    for r in Reg::ALL {
        let v = state.reg(r);
        report.put(format!("{prefix}{r}"), if dots { v.to_dotted() } else { v.to_string() });
    }
}

pub fn sim(argv: &[String], program_path: &Path, data_path: &Path, max_steps: u64, dots: bool) -> Result<Report> {
    let source = read(program_path)?;
    let data = read(data_path)?;
    let mut report = Report::new(argv, &[source.as_bytes(), data.as_bytes(), &max_steps.to_le_bytes()]);
    let program = assemble(&source).with_context(|| format!("{}", program_path.display()))?;
    let state = SequencerState::load(&data).with_context(|| format!("{}", data_path.display()))?;
    report.put("instructions", program.len());
    match run_sequencer(state, &program, max_steps) {
        Ok(end) => {
            put_regs(&mut report, "", &end, dots);
            for (i, row) in end.memory().rows().iter().enumerate() {
                report.put(format!("A[{}]", i + 1), row.to_string());
            }
        }
        Err(e) => {
            report.put("error", e.to_string());
            report.fail("runtime error");
        }
    }
    Ok(report)
}

/// Manifest: 16 non-comment lines of `<program> <data>`, row-major, with
/// paths relative to the manifest.
pub fn sim_grid(argv: &[String], manifest_path: &Path, max_steps: u64, dots: bool) -> Result<Report> {
    let manifest = read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut pairs: Vec<(PathBuf, PathBuf)> = Vec::new();
    for (n, line) in manifest.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [prog, data] = fields[..] else {
            bail!("{}:{}: expected `<program> <data>`", manifest_path.display(), n + 1);
        };
        pairs.push((base.join(prog), base.join(data)));
    }
    let cells = GRID_SIDE * GRID_SIDE;
    if pairs.len() != cells {
        bail!("{}: expected {cells} cells, found {}", manifest_path.display(), pairs.len());
    }

    let mut texts = vec![manifest.clone()];
    let mut programs = Vec::with_capacity(cells);
    let mut states = Vec::with_capacity(cells);
    for (i, (prog, data)) in pairs.iter().enumerate() {
        let at = format!("P[{},{}]", i / GRID_SIDE + 1, i % GRID_SIDE + 1);
        let source = read(prog)?;
        let text = read(data)?;
        programs.push(assemble(&source).with_context(|| format!("{at} {}", prog.display()))?);
        states.push(SequencerState::load(&text).with_context(|| format!("{at} {}", data.display()))?);
        texts.push(source);
        texts.push(text);
    }
    let mut inputs: Vec<&[u8]> = texts.iter().map(|t| t.as_bytes()).collect();
    let steps = max_steps.to_le_bytes();
    inputs.push(&steps);
    let mut report = Report::new(argv, &inputs);

    let programs: [Program; 16] = programs.try_into().expect("16 programs");
    let states: [SequencerState; 16] = states.try_into().expect("16 states");
    match run_grid(GridState::new(states), &programs, max_steps) {
        Ok(grid) => {
            for (i, cell) in grid.cells().iter().enumerate() {
                put_regs(&mut report, &format!("P[{},{}].", i / GRID_SIDE + 1, i % GRID_SIDE + 1), cell, dots);
            }
        }
        Err(e) => {
            for f in &e.failures {
                report.put(format!("P[{},{}].error", f.row + 1, f.col + 1), f.error.to_string());
            }
            report.fail(format!("{} cell(s) failed", e.failures.len()));
        }
    }
    Ok(report)
}

pub fn quality(argv: &[String], input: DesignQualityInput) -> Result<Report> {
    let echo = format!("{input:?}");
    let mut report = Report::new(argv, &[echo.as_bytes()]);
    let out = design_quality(&input)?;
    for (key, value) in [
        ("yield", out.yield_),
        ("fault_level", out.fault_level),
        ("time", out.time),
        ("hardware", out.hardware),
        ("estimate", out.estimate),
    ] {
        report.put(key, format!("{value:.12}"));
    }
    Ok(report)
}
