use super::Individual;

/// Unbounded set of mutually non-dominated feasible individuals, sorted by
/// ascending `f1` (and therefore strictly descending `f2_neg`).
#[derive(Debug, Clone, Default)]
pub struct EliteArchive {
    members: Vec<Individual>,
}

impl EliteArchive {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    /// Inserts a clone of `candidate` unless it is infeasible or weakly
    /// dominated by a member. Returns whether it was inserted.
    pub fn offer(&mut self, candidate: &Individual) -> bool {
        if !candidate.eval.is_feasible() {
            return false;
        }
        let [f1, f2] = candidate.eval.objectives();
        let pos = self.members.partition_point(|m| m.eval.f1 <= f1);
        if pos > 0 && self.members[pos - 1].eval.f2_neg <= f2 {
            return false;
        }
        // Members after `pos` have larger f1; the dominated ones form a prefix.
        let dominated_tail = self.members[pos..].iter().take_while(|m| m.eval.f2_neg >= f2).count();
        let mut start = pos;
        if pos > 0 && self.members[pos - 1].eval.f1 == f1 {
            start -= 1;
        }
        let mut inserted = candidate.clone();
        inserted.rank = 0;
        self.members.splice(start..pos + dominated_tail, std::iter::once(inserted));
        true
    }
}
