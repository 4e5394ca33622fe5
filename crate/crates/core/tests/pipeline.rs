use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlogic::cover::{
    build_repair_table, exact_cover_oracle, greedy_cover, repair_plan, service_memory, CoverError, MemoryModel,
    PlanVerdict, RepairInstance, Spare, SpareBudget, StuckAt,
};

const FAULTS: [(usize, usize); 10] = [(2, 2), (2, 5), (2, 8), (4, 3), (5, 5), (5, 8), (7, 2), (8, 5), (9, 3), (9, 7)];
const BUDGET: SpareBudget = SpareBudget { rows: 2, cols: 5 };

fn faulty_memory(seed: u64) -> MemoryModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = MemoryModel::new(13, 15);
    for (r, c) in FAULTS {
        let kind = if rng.gen() { StuckAt::One } else { StuckAt::Zero };
        m.inject(r, c, kind).unwrap();
    }
    m
}

fn spares(labels: &[&str]) -> Vec<Spare> {
    labels.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn memory_service_reproduces_the_column_plan() {
    for seed in 0..8 {
        let report = service_memory(&faulty_memory(seed), BUDGET).unwrap();
        assert_eq!(report.response.count_ones(), FAULTS.len());
        assert!(report.diagnosis.consistent);
        assert_eq!(report.located, FAULTS);

        let stage = report.repair.expect("faults were found");
        assert_eq!(stage.greedy.selection.to_string(), "11111000000");
        assert!(stage.plan.is_valid());
        let chosen: Vec<String> = stage.plan.spares.iter().map(|s| s.to_string()).collect();
        assert_eq!(chosen, ["C2", "C3", "C5", "C7", "C8"]);
        let remap: Vec<String> = stage.plan.remap.iter().map(|r| r.to_string()).collect();
        assert_eq!(remap, ["C2 -> s1", "C3 -> s2", "C5 -> s3", "C7 -> s4", "C8 -> s5"]);

        let optimum = exact_cover_oracle(&stage.coverage).unwrap()[0].len();
        assert_eq!(stage.greedy.chosen_rows().len(), optimum);
    }
}

#[test]
fn every_minimum_cover_is_a_valid_plan() {
    let inst = RepairInstance::new(13, 15, FAULTS, BUDGET).unwrap();
    let table = build_repair_table(&inst).unwrap();
    for cover in exact_cover_oracle(&table).unwrap() {
        let labels: Vec<String> = cover.iter().map(|&i| table.table.row_name(i)).collect();
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        assert!(repair_plan(&inst, &spares(&labels)).unwrap().is_valid(), "{labels:?}");
    }
}

#[test]
fn repair_table_counts_each_fault_twice() {
    let inst = RepairInstance::new(13, 15, FAULTS, BUDGET).unwrap();
    let table = build_repair_table(&inst).unwrap();
    let ones: usize = table.table.rows().iter().map(|r| r.count_ones()).sum();
    assert_eq!(ones, 2 * FAULTS.len());
    assert!(greedy_cover(&table).is_complete());
}

#[test]
fn redundant_and_oversized_plans() {
    let inst = RepairInstance::new(13, 15, FAULTS, BUDGET).unwrap();
    let table = build_repair_table(&inst).unwrap();
    let minimum = exact_cover_oracle(&table).unwrap()[0].len();

    let padded = repair_plan(&inst, &spares(&["C2", "C3", "C5", "C7", "C8", "R2"])).unwrap();
    assert!(padded.is_valid());
    assert!(padded.spares.len() > minimum);

    let tight = RepairInstance::new(13, 15, FAULTS, SpareBudget { rows: 2, cols: 4 }).unwrap();
    let plan = repair_plan(&tight, &spares(&["C2", "C3", "C5", "C7", "C8"])).unwrap();
    assert!(matches!(plan.verdict, PlanVerdict::BudgetExceeded { .. }));
    assert!(matches!(plan.into_result(), Err(CoverError::BudgetExceeded { .. })));
}
