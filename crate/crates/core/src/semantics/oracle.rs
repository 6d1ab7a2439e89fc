//! Brute-force behavioural equivalence: recolor every state by its current
//! color and the image of its successor structure under the coloring,
//! until the number of colors stops growing.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::model::{Coalgebra, Row, StateId, Weight};
use crate::partition::Partition;

/// F(coloring)(c(x)) over an unbounded color alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Image {
    Set(Vec<usize>),
    Weights(Vec<(usize, Weight)>),
    Labelled(Vec<Option<Vec<(usize, BigRational)>>>),
    Term(usize, Vec<usize>),
}

pub fn image(c: &Coalgebra, x: StateId, color: &[usize]) -> Image {
    match c.row(x) {
        Row::Set(succ) => {
            let mut v: Vec<usize> = succ.iter().map(|&y| color[y]).collect();
            v.sort_unstable();
            v.dedup();
            Image::Set(v)
        }
        Row::Weighted(succ) => {
            let mut acc: BTreeMap<usize, Weight> = BTreeMap::new();
            for (y, w) in succ {
                match acc.get_mut(&color[*y]) {
                    Some(a) => a.add_assign(w),
                    None => {
                        acc.insert(color[*y], w.clone());
                    }
                }
            }
            Image::Weights(acc.into_iter().filter(|(_, w)| !w.is_zero()).collect())
        }
        Row::Labelled(per_label) => Image::Labelled(
            per_label
                .iter()
                .map(|row| {
                    row.as_ref().map(|succ| {
                        let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
                        for (y, p) in succ {
                            *acc.entry(color[*y]).or_insert_with(BigRational::zero) += p;
                        }
                        acc.into_iter().filter(|(_, p)| !p.is_zero()).collect()
                    })
                })
                .collect(),
        ),
        Row::Term { symbol, args } => Image::Term(*symbol, args.iter().map(|&y| color[y]).collect()),
    }
}

/// Coarsest stable partition and the number of recoloring rounds that
/// changed something.
pub fn naive_partition_rounds(c: &Coalgebra) -> (Partition, usize) {
    let n = c.len();
    let mut color = vec![0usize; n];
    let mut count = usize::from(n > 0);
    let mut rounds = 0;
    loop {
        let mut ids: HashMap<(usize, Image), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|x| {
                let key = (color[x], image(c, x, &color));
                let fresh = ids.len();
                *ids.entry(key).or_insert(fresh)
            })
            .collect();
        let changed = ids.len() != count;
        count = ids.len();
        color = next;
        if !changed {
            break;
        }
        rounds += 1;
    }
    let mut blocks = vec![Vec::new(); count];
    for (x, &k) in color.iter().enumerate() {
        blocks[k].push(x);
    }
    (Partition::from_blocks(blocks), rounds)
}

pub fn naive_partition(c: &Coalgebra) -> Partition {
    naive_partition_rounds(c).0
}
