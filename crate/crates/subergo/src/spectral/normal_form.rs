use serde::Serialize;

use super::matrix::{is_primitive, CountMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    Zero,
    Primitive,
    IrreducibleImprimitive,
}

/// Strongly connected classes of the letter graph (b → a when a occurs in σ(b)),
/// ordered so that the permuted matrix is block upper triangular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    /// New position i holds original letter permutation[i].
    pub permutation: Vec<usize>,
    /// Original letter indices of each class, ascending inside a class.
    pub blocks: Vec<Vec<usize>>,
    pub kinds: Vec<BlockKind>,
    /// For each block, whether it is closed: its letters' images stay inside it.
    pub closed: Vec<bool>,
}

impl BlockStructure {
    pub fn block_of(&self, letter: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&letter)).expect("letter without block")
    }

    /// The candidate B-part: the last block, when there are at least two.
    pub fn b_part(&self) -> Option<&[usize]> {
        (self.blocks.len() >= 2).then(|| self.blocks.last().unwrap().as_slice())
    }

    /// Every letter above the B-part, in normal-form order.
    pub fn a_part(&self) -> Option<Vec<usize>> {
        (self.blocks.len() >= 2)
            .then(|| self.blocks[..self.blocks.len() - 1].iter().flatten().copied().collect())
    }

    /// Exact check that `m` permuted by this structure is block upper triangular.
    pub fn is_block_upper_triangular(&self, m: &CountMatrix) -> bool {
        let n = m.n();
        let mut pos_block = vec![0; n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &l in b {
                pos_block[l] = k;
            }
        }
        (0..n).all(|a| (0..n).all(|b| m.get(a, b) == 0 || pos_block[a] <= pos_block[b]))
    }
}

/// Tarjan's algorithm followed by a topological sort of the condensation.
pub fn normal_form(m: &CountMatrix) -> BlockStructure {
    let n = m.n();
    // successors of b: letters occurring in σ(b)
    let succ: Vec<Vec<usize>> = (0..n).map(|b| (0..n).filter(|&a| m.get(a, b) > 0).collect()).collect();
    let comp = tarjan(&succ);
    let n_comp = comp.iter().max().map_or(0, |&c| c + 1);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    // Block X must come before Y when some letter of Y has a letter of X in its image.
    let mut needs: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for b in 0..n {
        for &a in &succ[b] {
            let (ca, cb) = (comp[a], comp[b]);
            if ca != cb && !needs[cb].contains(&ca) {
                needs[cb].push(ca);
            }
        }
    }
    let mut placed = vec![false; n_comp];
    let mut order = Vec::with_capacity(n_comp);
    for _ in 0..n_comp {
        let next = (0..n_comp)
            .filter(|&c| !placed[c] && needs[c].iter().all(|&d| placed[d]))
            .min_by_key(|&c| members[c][0])
            .expect("condensation is acyclic");
        placed[next] = true;
        order.push(next);
    }

    let blocks: Vec<Vec<usize>> = order.iter().map(|&c| members[c].clone()).collect();
    let kinds = blocks
        .iter()
        .map(|b| {
            let sub = m.submatrix(b);
            if sub.is_zero() {
                BlockKind::Zero
            } else if is_primitive(&sub) {
                BlockKind::Primitive
            } else {
                BlockKind::IrreducibleImprimitive
            }
        })
        .collect();
    let closed = order.iter().map(|&c| needs[c].is_empty()).collect();
    let permutation = blocks.iter().flatten().copied().collect();
    BlockStructure { permutation, blocks, kinds, closed }
}

fn tarjan(succ: &[Vec<usize>]) -> Vec<usize> {
    struct State<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }

    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next_index);
        s.low[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for i in 0..s.succ[v].len() {
            let w = s.succ[v][i];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack[w] = false;
                s.comp[w] = s.next_comp;
                if w == v {
                    break;
                }
            }
            s.next_comp += 1;
        }
    }

    let n = succ.len();
    let mut s = State {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next_index: 0,
        next_comp: 0,
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.comp
}
