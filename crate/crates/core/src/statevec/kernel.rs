//! Block gather/scatter kernel.
//!
//! An operator acting on a set of target registers, possibly restricted by
//! conditions on other registers, decomposes the amplitude array into
//! disjoint blocks: one block per assignment of the non-target registers
//! that satisfies every condition. Each block is gathered into a contiguous
//! buffer of length `local_dim`, transformed, and scattered back.

use crate::par::{self, Execution};
use crate::statevec::RegisterLayout;
use crate::{Error, Result, C64};

/// Below this many touched amplitudes a kernel stays on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;
/// Target number of amplitudes handled per parallel work item.
const CHUNK_AMPLITUDES: usize = 1 << 12;

/// Predicate on the value of a control register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Equals(usize),
    /// Value is at least the bound. Used by the phase-register controls of
    /// phase estimation over a register of arbitrary dimension.
    AtLeast(usize),
}

impl Condition {
    pub fn holds(self, value: usize) -> bool {
        match self {
            Condition::Equals(v) => value == v,
            Condition::AtLeast(v) => value >= v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct PlanKey {
    pub targets: Vec<usize>,
    pub conditions: Vec<(usize, Condition)>,
}

#[derive(Debug)]
pub(crate) struct BlockPlan {
    /// Offset of each local basis index relative to the block base.
    pub offsets: Vec<usize>,
    /// Joint index of local basis state 0 for every block.
    pub bases: Vec<usize>,
}

impl BlockPlan {
    pub fn build(layout: &RegisterLayout, key: &PlanKey) -> Result<BlockPlan> {
        for (i, &t) in key.targets.iter().enumerate() {
            if key.targets[..i].contains(&t) {
                return Err(Error::DuplicateRegister(layout.registers()[t].name.clone()));
            }
            if key.conditions.iter().any(|&(c, _)| c == t) {
                return Err(Error::ControlOverlapsTarget(
                    layout.registers()[t].name.clone(),
                ));
            }
        }

        let mut offsets = vec![0usize];
        for &t in &key.targets {
            let (dim, stride) = (layout.dim_at(t), layout.stride_at(t));
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dim).map(move |v| o + v * stride))
                .collect();
        }

        let mut bases = vec![0usize];
        for pos in 0..layout.registers().len() {
            if key.targets.contains(&pos) {
                continue;
            }
            let stride = layout.stride_at(pos);
            let allowed: Vec<usize> = (0..layout.dim_at(pos))
                .filter(|&v| {
                    key.conditions
                        .iter()
                        .filter(|&&(c, _)| c == pos)
                        .all(|&(_, cond)| cond.holds(v))
                })
                .collect();
            bases = bases
                .iter()
                .flat_map(|&b| allowed.iter().map(move |&v| b + v * stride))
                .collect();
        }
        Ok(BlockPlan { offsets, bases })
    }

    pub fn local_dim(&self) -> usize {
        self.offsets.len()
    }
}

#[derive(Clone, Copy)]
struct AmpPtr(*mut C64);
// SAFETY: blocks of one plan touch pairwise disjoint index sets (bases differ
// in at least one non-target digit, offsets only vary target digits), so
// concurrent tasks never alias an element.
unsafe impl Send for AmpPtr {}
unsafe impl Sync for AmpPtr {}

/// Applies `f(block, scratch)` to every block of `plan`.
pub(crate) fn for_each_block<F>(amps: &mut [C64], plan: &BlockPlan, f: F)
where
    F: Fn(&mut [C64], &mut [C64]) + Sync + Send,
{
    let local = plan.local_dim();
    let touched = local * plan.bases.len();
    debug_assert!(plan
        .bases
        .last()
        .is_none_or(|&b| b + plan.offsets.last().copied().unwrap_or(0) < amps.len()));
    let exec = if touched >= PARALLEL_THRESHOLD {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let ptr = AmpPtr(amps.as_mut_ptr());
    let chunk = (CHUNK_AMPLITUDES / local).max(1);
    par::for_each_chunk(plan.bases.len(), chunk, exec, |range| {
        let p = ptr;
        let mut buf = vec![C64::default(); local];
        let mut scratch = vec![C64::default(); local];
        for &base in &plan.bases[range] {
            for (slot, &o) in buf.iter_mut().zip(&plan.offsets) {
                // SAFETY: in bounds by plan construction; disjoint per block.
                *slot = unsafe { *p.0.add(base + o) };
            }
            f(&mut buf, &mut scratch);
            for (slot, &o) in buf.iter().zip(&plan.offsets) {
                unsafe { *p.0.add(base + o) = *slot };
            }
        }
    });
}
