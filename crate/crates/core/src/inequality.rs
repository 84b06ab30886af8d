//! Noncontextuality inequalities.
//!
//! For a structure with contexts `c` the inequality is
//! `Σ_c parity(c)·⟨∏_{x∈c} x⟩ ≤ bound`; for the square this is
//! `⟨ABC⟩ + ⟨abc⟩ + ⟨αβγ⟩ + ⟨Aaα⟩ + ⟨Bbβ⟩ − ⟨Ccγ⟩ ≤ 4`. Quantum mechanics
//! satisfies every context, reaching the number of contexts.

use crate::automaton::MealyAutomaton;
use crate::checker::ORDERS;
use crate::error::{Error, Result};
use crate::observables::{embedded_pm_squares, ObservableStructure, Sign, StructureKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityResult {
    pub value: i32,
    /// Observed product per context, in structure order.
    pub per_context: Vec<Sign>,
    /// Coefficient of each term (the context parity).
    pub coefficients: Vec<Sign>,
    pub bound_noncontextual: i32,
    pub bound_quantum: i32,
}

impl InequalityResult {
    fn new(s: &ObservableStructure, per_context: Vec<Sign>, bound_noncontextual: i32) -> InequalityResult {
        let coefficients: Vec<Sign> = s.contexts().iter().map(|c| c.parity).collect();
        let value = per_context.iter().zip(&coefficients).map(|(&t, &c)| (t * c).as_i32()).sum();
        InequalityResult {
            value,
            per_context,
            coefficients,
            bound_noncontextual,
            bound_quantum: s.contexts().len() as i32,
        }
    }
}

fn require_pm(a: &MealyAutomaton) -> Result<()> {
    match a.kind() {
        StructureKind::Pm => Ok(()),
        _ => Err(Error::WrongStructure { expected: "pm" }),
    }
}

/// χ of a deterministic machine re-initialized to `initial` before each
/// term; each context is measured in written order.
pub fn chi_automaton(a: &MealyAutomaton, initial: usize) -> Result<InequalityResult> {
    require_pm(a)?;
    let s = a.structure();
    let per_context = s
        .contexts()
        .iter()
        .map(|c| Ok(Sign::product(a.run(initial, &c.members)?.outputs)))
        .collect::<Result<Vec<_>>>()?;
    Ok(InequalityResult::new(s, per_context, 4))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiSpread {
    pub min: i32,
    pub max: i32,
    /// Products per context for each of the 3! measurement orders.
    pub per_context: Vec<[Sign; 6]>,
}

/// χ over every measurement order of every term.
pub fn chi_all_orders(a: &MealyAutomaton, initial: usize) -> Result<ChiSpread> {
    require_pm(a)?;
    let s = a.structure();
    let mut per_context = Vec::new();
    let (mut min, mut max) = (0, 0);
    for ctx in s.contexts() {
        let mut products = [Sign::Plus; 6];
        for (slot, order) in products.iter_mut().zip(ORDERS) {
            let seq: Vec<_> = order.iter().map(|&i| ctx.members[i]).collect();
            *slot = Sign::product(a.run(initial, &seq)?.outputs);
        }
        let terms = products.iter().map(|&t| (t * ctx.parity).as_i32());
        min += terms.clone().min().unwrap();
        max += terms.max().unwrap();
        per_context.push(products);
    }
    Ok(ChiSpread { min, max, per_context })
}

/// A noncontextual assignment as a bit mask: bit `x` set means `x = -1`.
pub type Assignment = u32;

fn context_masks(s: &ObservableStructure) -> Vec<(u32, Sign)> {
    s.contexts().iter().map(|c| (c.members.iter().map(|&x| 1u32 << x).sum(), c.parity)).collect()
}

fn product_of(mask: u32) -> Sign {
    if mask.count_ones() % 2 == 1 {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Mask of contexts whose product under `assignment` differs from the parity.
pub fn violated_mask(s: &ObservableStructure, assignment: Assignment) -> u32 {
    violated_with(&context_masks(s), assignment)
}

fn violated_with(masks: &[(u32, Sign)], assignment: Assignment) -> u32 {
    masks
        .iter()
        .enumerate()
        .filter(|(_, &(m, parity))| product_of(assignment & m) != parity)
        .map(|(i, _)| 1u32 << i)
        .sum()
}

pub fn assignment_signs(s: &ObservableStructure, assignment: Assignment) -> Vec<Sign> {
    (0..s.len()).map(|x| if assignment >> x & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect()
}

pub fn assignment_value(s: &ObservableStructure, assignment: Assignment) -> InequalityResult {
    let per_context = context_masks(s).iter().map(|&(m, _)| product_of(assignment & m)).collect();
    let contexts = s.contexts().len() as i32;
    InequalityResult::new(s, per_context, contexts - 2 * min_violations(s) as i32)
}

fn all_assignments(s: &ObservableStructure) -> std::ops::Range<u32> {
    0..1u32 << s.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoncontextualMax {
    pub max: i32,
    /// First assignment (in mask order) attaining the maximum.
    pub witness: Assignment,
    pub quantum: i32,
}

/// Largest inequality value over all `2^n` noncontextual assignments.
pub fn noncontextual_max(s: &ObservableStructure) -> NoncontextualMax {
    let masks = context_masks(s);
    let contexts = masks.len() as i32;
    let (max, witness) = all_assignments(s)
        .map(|t| (contexts - 2 * violated_with(&masks, t).count_ones() as i32, t))
        .fold((i32::MIN, 0), |best, cur| if cur.0 > best.0 { cur } else { best });
    NoncontextualMax { max, witness, quantum: contexts }
}

/// Fewest contexts any noncontextual assignment gets wrong.
pub fn min_violations(s: &ObservableStructure) -> u32 {
    let masks = context_masks(s);
    all_assignments(s).map(|t| violated_with(&masks, t).count_ones()).min().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareLemmaReport {
    /// Every assignment leaves some embedded square with at least three violations.
    pub holds: bool,
    /// Every (assignment, square) violation count is odd.
    pub counts_odd: bool,
    pub assignments: u64,
    pub squares: usize,
    /// `histogram[c]`: number of (assignment, square) pairs with `c` violations.
    pub histogram: [u64; 7],
    /// `worst[c]`: number of assignments whose most-violated square has `c` violations.
    pub worst: [u64; 7],
}

/// Checks over all `2^15` assignments of the extended square that some
/// embedded square collects three or more violated contexts.
pub fn three_contradiction_square_lemma() -> SquareLemmaReport {
    let s = StructureKind::Extended15.structure();
    let masks = context_masks(s);
    let squares: Vec<u32> =
        embedded_pm_squares(s).iter().map(|q| q.contexts.iter().map(|&c| 1u32 << c).sum()).collect();
    let mut report = SquareLemmaReport {
        holds: true,
        counts_odd: true,
        assignments: 0,
        squares: squares.len(),
        histogram: [0; 7],
        worst: [0; 7],
    };
    for t in all_assignments(s) {
        let violated = violated_with(&masks, t);
        let mut worst = 0;
        for &sq in &squares {
            let c = (violated & sq).count_ones();
            report.histogram[c as usize] += 1;
            report.counts_odd &= c % 2 == 1;
            worst = worst.max(c);
        }
        report.worst[worst as usize] += 1;
        report.holds &= worst >= 3;
        report.assignments += 1;
    }
    report
}
