use serde::{Deserialize, Serialize};

/// Signal phases cycle NS green → NS amber → EW green → EW amber → NS green.
/// Amber is the non-interruptible clearance interval after the green it is
/// named for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseId {
    NsGreen,
    NsAmber,
    EwGreen,
    EwAmber,
}

impl PhaseId {
    pub fn is_green(self) -> bool {
        matches!(self, PhaseId::NsGreen | PhaseId::EwGreen)
    }

    pub fn is_amber(self) -> bool {
        matches!(self, PhaseId::NsAmber | PhaseId::EwAmber)
    }

    /// Next phase in the fixed cycle.
    pub fn next(self) -> PhaseId {
        match self {
            PhaseId::NsGreen => PhaseId::NsAmber,
            PhaseId::NsAmber => PhaseId::EwGreen,
            PhaseId::EwGreen => PhaseId::EwAmber,
            PhaseId::EwAmber => PhaseId::NsGreen,
        }
    }

    /// Whether vehicles on `approach` may cross the stop line right now.
    /// Amber counts as red for movement.
    pub fn approach_has_green(self, approach: usize) -> bool {
        match self {
            PhaseId::NsGreen => approach % 2 == 0,
            PhaseId::EwGreen => approach % 2 == 1,
            PhaseId::NsAmber | PhaseId::EwAmber => false,
        }
    }

    /// Whether `approach` belongs to the active green group; during amber
    /// this is the group of the green that just ended.
    pub fn approach_in_green_group(self, approach: usize) -> bool {
        match self {
            PhaseId::NsGreen | PhaseId::NsAmber => approach % 2 == 0,
            PhaseId::EwGreen | PhaseId::EwAmber => approach % 2 == 1,
        }
    }
}

/// Current phase plus how long it has been active.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalPhase {
    pub id: PhaseId,
    /// Seconds spent in the current phase.
    pub elapsed: f64,
}

impl SignalPhase {
    pub fn new(id: PhaseId) -> Self {
        Self { id, elapsed: 0.0 }
    }
}

/// The two controller commands: keep the running phase or begin the switch
/// to the other green (through amber).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Keep,
    Switch,
}

impl Action {
    pub const COUNT: usize = 2;

    pub fn index(self) -> usize {
        match self {
            Action::Keep => 0,
            Action::Switch => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Action> {
        match index {
            0 => Some(Action::Keep),
            1 => Some(Action::Switch),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_order() {
        let mut id = PhaseId::NsGreen;
        let expected = [
            PhaseId::NsAmber,
            PhaseId::EwGreen,
            PhaseId::EwAmber,
            PhaseId::NsGreen,
        ];
        for want in expected {
            id = id.next();
            assert_eq!(id, want);
        }
    }

    #[test]
    fn amber_blocks_all_approaches() {
        for approach in 0..4 {
            assert!(!PhaseId::NsAmber.approach_has_green(approach));
            assert!(!PhaseId::EwAmber.approach_has_green(approach));
        }
    }

    #[test]
    fn green_group_follows_preceding_green_during_amber() {
        assert!(PhaseId::NsAmber.approach_in_green_group(0));
        assert!(PhaseId::NsAmber.approach_in_green_group(2));
        assert!(!PhaseId::NsAmber.approach_in_green_group(1));
        assert!(PhaseId::EwAmber.approach_in_green_group(3));
    }

    #[test]
    fn action_index_round_trip() {
        for action in [Action::Keep, Action::Switch] {
            assert_eq!(Action::from_index(action.index()), Some(action));
        }
        assert_eq!(Action::from_index(2), None);
    }
}
