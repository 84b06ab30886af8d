//! Symmetries of a structure that preserve every obedience verdict, and
//! canonical forms of automata under them.
//!
//! A symmetry is a permutation `π` of the observables mapping contexts to
//! contexts together with sign flips `s` such that
//! `parity(π(c)) = parity(c)·∏_{x∈c} s_x`. It maps an automaton to the one
//! answering `s_x·value(q, x)` for `π(x)`.

use std::collections::{BTreeSet, VecDeque};

use crate::automaton::MealyAutomaton;
use crate::observables::{ObsId, ObservableStructure, Sign, StructureKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symmetry {
    perm: Vec<ObsId>,
    flips: u32,
}

impl Symmetry {
    pub fn identity(n: usize) -> Symmetry {
        Symmetry { perm: (0..n).collect(), flips: 0 }
    }

    /// `perm[x]` is the image of observable `x`.
    pub fn perm(&self) -> &[ObsId] {
        &self.perm
    }

    /// Bit `x` set: outcomes of `x` are negated.
    pub fn flips(&self) -> u32 {
        self.flips
    }

    /// Whether this maps contexts of `s` to contexts with matching parities.
    pub fn is_valid(&self, s: &ObservableStructure) -> bool {
        s.contexts().iter().all(|c| {
            let image = [self.perm[c.members[0]], self.perm[c.members[1]], self.perm[c.members[2]]];
            let flipped = Sign::product(c.members.iter().map(|&x| flip_sign(self.flips, x)));
            s.find_context(image).is_some_and(|d| s.contexts()[d].parity == c.parity * flipped)
        })
    }

    pub fn apply(&self, a: &MealyAutomaton) -> MealyAutomaton {
        let n = a.num_observables();
        let mut values = vec![Sign::Plus; a.num_states() * n];
        let mut next = vec![0; a.num_states() * n];
        for q in 0..a.num_states() {
            for x in 0..n {
                values[q * n + self.perm[x]] = a.value(q, x) * flip_sign(self.flips, x);
                next[q * n + self.perm[x]] = a.next(q, x);
            }
        }
        MealyAutomaton::new(a.kind(), values, next, a.initial()).expect("same shape")
    }

    /// Image of a value table given as a mask (bit `x` set means `-1`).
    pub fn apply_table(&self, table: u32) -> u32 {
        (0..self.perm.len()).map(|x| ((table ^ self.flips) >> x & 1) << self.perm[x]).sum()
    }
}

fn flip_sign(flips: u32, x: ObsId) -> Sign {
    if flips >> x & 1 == 1 {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Which symmetries to quotient by. State relabelings are always factored
/// out by the search itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymmetryFlags {
    /// Sign flips (products of 2×2 sub-square flips on the square).
    pub sign_flips: bool,
    /// Row permutations and the swap of the first two columns.
    pub square: bool,
    /// Additionally the transpose and all column permutations.
    pub transpose: bool,
}

impl SymmetryFlags {
    pub const NONE: SymmetryFlags = SymmetryFlags { sign_flips: false, square: false, transpose: false };
    pub const DECLARED: SymmetryFlags = SymmetryFlags { sign_flips: true, square: true, transpose: false };
    pub const EXTENDED: SymmetryFlags = SymmetryFlags { sign_flips: true, square: true, transpose: true };
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

fn square_permutations(flags: SymmetryFlags) -> Vec<Vec<ObsId>> {
    // Observable 3r + c sits in row r, column c.
    let mut perms = Vec::new();
    let rows = permutations(&[0, 1, 2]);
    let cols = if flags.transpose { permutations(&[0, 1, 2]) } else { vec![vec![0, 1, 2], vec![1, 0, 2]] };
    let transposes: &[bool] = if flags.transpose { &[false, true] } else { &[false] };
    for &t in transposes {
        for r in &rows {
            for c in &cols {
                perms.push(
                    (0..9)
                        .map(|x| {
                            let (row, col) = (r[x / 3], c[x % 3]);
                            if t {
                                3 * col + row
                            } else {
                                3 * row + col
                            }
                        })
                        .collect(),
                );
            }
        }
    }
    perms
}

/// Permutations of all 15 observables induced by the symplectic maps of the
/// two-qubit Pauli group, which preserve commutation and hence contexts.
fn symplectic_permutations(s: &ObservableStructure) -> Vec<Vec<ObsId>> {
    let vector = |x: ObsId| {
        let p = s.pauli(x);
        p.x_bits() | p.z_bits() << 2
    };
    let form = |u: u8, v: u8| ((u & 3) & (v >> 2) ^ (u >> 2) & (v & 3)).count_ones() % 2;
    let id_of: Vec<Option<ObsId>> = (0..16u8).map(|v| (0..s.len()).find(|&x| vector(x) == v)).collect();
    let mut perms = Vec::new();
    for images in
        (0..15u32.pow(4)).map(|i| [1 + i % 15, 1 + i / 15 % 15, 1 + i / 225 % 15, 1 + i / 3375].map(|b| b as u8))
    {
        let preserved = (0..4).all(|i| (0..4).all(|j| form(images[i], images[j]) == form(1 << i, 1 << j)));
        if !preserved {
            continue;
        }
        let map = |v: u8| (0..4).filter(|i| v >> i & 1 == 1).fold(0, |acc, i| acc ^ images[i]);
        let perm: Option<Vec<ObsId>> = (0..s.len()).map(|x| id_of[map(vector(x)) as usize]).collect();
        if let Some(perm) = perm {
            perms.push(perm);
        }
    }
    perms
}

/// Bit `c` set when flipping `flips` changes the parity of context `c`.
fn syndrome(s: &ObservableStructure, flips: u32) -> u32 {
    s.contexts()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.members.iter().map(|&x| flips >> x & 1).sum::<u32>() & 1) << i)
        .sum()
}

/// The symmetry group selected by `flags`, sorted, identity first.
///
/// On the square `flags.square` adds row permutations and the swap of the
/// first two columns, and `flags.transpose` every permutation of rows and
/// columns and the transpose. On the extended structure `flags.square` adds
/// every permutation preserving commutation.
pub fn symmetry_group(s: &ObservableStructure, flags: SymmetryFlags) -> Vec<Symmetry> {
    let n = s.len();
    let perms = if !flags.square {
        vec![(0..n).collect()]
    } else if s.name() == StructureKind::Pm.name() {
        square_permutations(flags)
    } else if s.name() == StructureKind::Extended15.name() {
        symplectic_permutations(s)
    } else {
        vec![(0..n).collect()]
    };
    // Flips solving each context's parity change, indexed by syndrome.
    let mut solutions: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
    let flip_masks = if flags.sign_flips { 1u32 << n } else { 1 };
    for flips in 0..flip_masks {
        solutions.entry(syndrome(s, flips)).or_default().push(flips);
    }
    let mut group = BTreeSet::new();
    for perm in perms {
        let Some(images) =
            s.contexts().iter().map(|c| s.find_context(c.members.map(|x| perm[x]))).collect::<Option<Vec<usize>>>()
        else {
            continue;
        };
        let wanted: u32 = s
            .contexts()
            .iter()
            .zip(&images)
            .enumerate()
            .map(|(i, (c, &d))| u32::from(s.contexts()[d].parity != c.parity) << i)
            .sum();
        for &flips in solutions.get(&wanted).into_iter().flatten() {
            let g = Symmetry { perm: perm.clone(), flips };
            debug_assert!(g.is_valid(s));
            group.insert(g);
        }
    }
    group.into_iter().collect()
}

/// Smallest value table (as a mask) of every orbit of the group.
pub fn table_orbit_representatives(n: usize, group: &[Symmetry]) -> Vec<u32> {
    let mut seen = vec![false; 1 << n];
    let mut reps = Vec::new();
    // Tables are visited in increasing order, so the first of an orbit is its minimum.
    for t in 0..1u32 << n {
        if !seen[t as usize] {
            reps.push(t);
            for g in group {
                seen[g.apply_table(t) as usize] = true;
            }
        }
    }
    reps
}

/// Breadth-first relabeling from `root`; `None` when some state is unreachable.
fn encode(a: &MealyAutomaton, root: usize) -> Option<Vec<u8>> {
    let (k, n) = (a.num_states(), a.num_observables());
    let mut id = vec![usize::MAX; k];
    let mut order = vec![root];
    id[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(q) = queue.pop_front() {
        for x in 0..n {
            let t = a.next(q, x);
            if id[t] == usize::MAX {
                id[t] = order.len();
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    if order.len() < k {
        return None;
    }
    let mut code = Vec::with_capacity(2 * k * n);
    for &q in &order {
        for x in 0..n {
            code.push(u8::from(a.value(q, x).is_minus()));
            code.push(id[a.next(q, x)] as u8);
        }
    }
    Some(code)
}

fn decode(a: &MealyAutomaton, code: &[u8]) -> MealyAutomaton {
    let values = code.chunks(2).map(|p| if p[0] == 1 { Sign::Minus } else { Sign::Plus }).collect();
    let next = code.chunks(2).map(|p| p[1] as usize).collect();
    MealyAutomaton::new(a.kind(), values, next, 0).expect("encoding is valid")
}

/// The least breadth-first encoding over the group (and over all roots
/// when `ignore_initial`), as an automaton with initial state 0.
/// `None` if no admissible root reaches every state.
pub fn canonical_form(a: &MealyAutomaton, group: &[Symmetry], ignore_initial: bool) -> Option<MealyAutomaton> {
    let roots: Vec<usize> = if ignore_initial { (0..a.num_states()).collect() } else { vec![a.initial()] };
    group
        .iter()
        .flat_map(|g| {
            let b = g.apply(a);
            roots.iter().filter_map(move |&r| encode(&b, r)).collect::<Vec<_>>()
        })
        .min()
        .map(|code| decode(a, &code))
}

/// Distinct canonical forms, sorted.
pub fn equivalence_classes(
    automata: &[MealyAutomaton],
    group: &[Symmetry],
    ignore_initial: bool,
) -> Vec<MealyAutomaton> {
    let set: BTreeSet<Vec<u8>> = automata
        .iter()
        .filter_map(|a| canonical_form(a, group, ignore_initial))
        .map(|c| encode(&c, 0).expect("canonical forms are trim"))
        .collect();
    match automata.first() {
        Some(a) => set.iter().map(|code| decode(a, code)).collect(),
        None => Vec::new(),
    }
}

pub(crate) fn encoding(a: &MealyAutomaton) -> Vec<u8> {
    encode(a, a.initial()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{a3, a4};
    use crate::checker::{check, Family};

    fn pm() -> &'static ObservableStructure {
        StructureKind::Pm.structure()
    }

    #[test]
    fn group_orders() {
        assert_eq!(symmetry_group(pm(), SymmetryFlags::NONE).len(), 1);
        assert_eq!(symmetry_group(pm(), SymmetryFlags { sign_flips: true, ..SymmetryFlags::NONE }).len(), 16);
        assert_eq!(symmetry_group(pm(), SymmetryFlags { square: true, ..SymmetryFlags::NONE }).len(), 12);
        assert_eq!(symmetry_group(pm(), SymmetryFlags::DECLARED).len(), 12 * 16);
        assert_eq!(symmetry_group(pm(), SymmetryFlags::EXTENDED).len(), 72 * 16);
        let ext = StructureKind::Extended15.structure();
        // Fifteen parity constraints of rank ten leave 2^5 sign flips.
        assert_eq!(symmetry_group(ext, SymmetryFlags { sign_flips: true, ..SymmetryFlags::NONE }).len(), 32);
        // Every symplectic map lifts to a Clifford unitary, which fixes the parities up to flips.
        assert_eq!(symmetry_group(ext, SymmetryFlags::DECLARED).len(), 720 * 32);
    }

    #[test]
    fn group_is_closed_under_composition() {
        let group = symmetry_group(pm(), SymmetryFlags::DECLARED);
        let a = a4();
        let set: BTreeSet<Vec<u8>> = group.iter().map(|g| encoding(&g.apply(&a))).collect();
        for g in group.iter().step_by(17) {
            for h in group.iter().step_by(13) {
                assert!(set.contains(&encoding(&h.apply(&g.apply(&a)))));
            }
        }
    }

    #[test]
    fn symmetries_preserve_verdicts() {
        for g in symmetry_group(pm(), SymmetryFlags::EXTENDED).iter().step_by(7) {
            for a in [a3(), a4()] {
                let b = g.apply(&a);
                for f in [Family::Rc, Family::Repeat, Family::ContextPrime, Family::CompatPrime] {
                    assert_eq!(check(&a, f).obeys, check(&b, f).obeys, "{f}");
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_invariant() {
        let group = symmetry_group(pm(), SymmetryFlags::DECLARED);
        let c = canonical_form(&a4(), &group, true).unwrap();
        for g in group.iter().step_by(11) {
            let b = g.apply(&a4()).relabel(&[3, 1, 0, 2]);
            assert_eq!(canonical_form(&b, &group, true).unwrap(), c);
        }
        assert_eq!(equivalence_classes(&[a4(), a4().relabel(&[1, 0, 2, 3])], &group, true).len(), 1);
    }

    #[test]
    fn orbit_representatives_cover_all_tables() {
        let group = symmetry_group(pm(), SymmetryFlags::DECLARED);
        let reps = table_orbit_representatives(9, &group);
        let covered: BTreeSet<u32> = reps.iter().flat_map(|&r| group.iter().map(move |g| g.apply_table(r))).collect();
        assert_eq!(covered.len(), 512);
    }
}
