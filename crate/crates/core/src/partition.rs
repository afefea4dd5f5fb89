//! Residual change, core/periphery partitions, and membership dynamics.
//!
//! Between two snapshots of the same system, the residual is the set of
//! elements present at the later time but not the earlier one, per
//! component. The core is the intersection of the two snapshots and the
//! periphery equals the residual; elements present earlier but gone later
//! are tracked as the shed set. Per component:
//!
//! ```text
//! core      = set(t) ∩ set(t')
//! periphery = set(t') ∖ set(t)      (the residual)
//! shed      = set(t)  ∖ set(t')
//! ```
//!
//! so `core ∪ periphery = set(t')`, `core ∪ shed = set(t)`, and the three
//! parts are pairwise disjoint.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::system::{Component, SystemSnapshot, Trace};

/// A closed time interval between two snapshot indices, `from <= to`.
///
/// Degenerate intervals (`from == to`) are allowed and yield empty
/// periphery and shed sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interval {
    pub from: u64,
    pub to: u64,
}

impl Interval {
    pub fn new(from: u64, to: u64) -> Result<Self> {
        if from > to {
            return Err(Error::TimeOrder { system: String::new(), t: to });
        }
        Ok(Interval { from, to })
    }
}

/// One labeled element set per component role.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentSets {
    pub input: BTreeSet<String>,
    pub output: BTreeSet<String>,
}

impl ComponentSets {
    pub fn get(&self, component: Component) -> &BTreeSet<String> {
        match component {
            Component::Input => &self.input,
            Component::Output => &self.output,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty() && self.output.is_empty()
    }

    pub fn len(&self) -> usize {
        self.input.len() + self.output.len()
    }
}

/// The residual change in system structure over an interval: per component,
/// the elements present at the later time but not the earlier one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub system_id: String,
    pub interval: Interval,
    pub input_part: BTreeSet<String>,
    pub output_part: BTreeSet<String>,
}

/// A core/periphery partition of a system over an interval, with the shed
/// set recorded separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorePeripheryPartition {
    pub system_id: String,
    pub interval: Interval,
    pub core: ComponentSets,
    pub periphery: ComponentSets,
    pub shed: ComponentSets,
}

/// Where an element stands on one interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipState {
    /// Present at both endpoints.
    Core,
    /// Present only at the later endpoint.
    Periphery,
    /// Present only at the earlier endpoint.
    Shed,
    /// Present at neither endpoint.
    Absent,
}

impl MembershipState {
    pub fn as_str(self) -> &'static str {
        match self {
            MembershipState::Core => "core",
            MembershipState::Periphery => "periphery",
            MembershipState::Shed => "shed",
            MembershipState::Absent => "absent",
        }
    }
}

/// An element's state on one consecutive interval of a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipEntry {
    pub interval: Interval,
    pub state: MembershipState,
}

/// Periphery-to-core absorption across two consecutive intervals: elements
/// peripheral on the first interval that are core on the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionEvent {
    pub first: Interval,
    pub second: Interval,
    pub absorbed: ComponentSets,
}

fn check_snapshot_pair(earlier: &SystemSnapshot, later: &SystemSnapshot) -> Result<Interval> {
    if earlier.system_id != later.system_id {
        return Err(Error::SystemMismatch {
            left: earlier.system_id.clone(),
            right: later.system_id.clone(),
        });
    }
    if earlier.t > later.t {
        return Err(Error::TimeOrder { system: later.system_id.clone(), t: later.t });
    }
    Interval::new(earlier.t, later.t)
}

/// The residual change from `earlier` to `later`, per component.
pub fn residual(earlier: &SystemSnapshot, later: &SystemSnapshot) -> Result<Residual> {
    let interval = check_snapshot_pair(earlier, later)?;
    Ok(Residual {
        system_id: earlier.system_id.clone(),
        interval,
        input_part: later.inputs.difference(&earlier.inputs).cloned().collect(),
        output_part: later.outputs.difference(&earlier.outputs).cloned().collect(),
    })
}

/// Partitions the later snapshot's elements into core (also present
/// earlier) and periphery (the residual), recording shed elements.
pub fn partition(
    earlier: &SystemSnapshot,
    later: &SystemSnapshot,
) -> Result<CorePeripheryPartition> {
    let interval = check_snapshot_pair(earlier, later)?;
    let split = |old: &BTreeSet<String>, new: &BTreeSet<String>| {
        let core: BTreeSet<String> = old.intersection(new).cloned().collect();
        let periphery: BTreeSet<String> = new.difference(old).cloned().collect();
        let shed: BTreeSet<String> = old.difference(new).cloned().collect();
        (core, periphery, shed)
    };
    let (core_in, peri_in, shed_in) = split(&earlier.inputs, &later.inputs);
    let (core_out, peri_out, shed_out) = split(&earlier.outputs, &later.outputs);
    Ok(CorePeripheryPartition {
        system_id: earlier.system_id.clone(),
        interval,
        core: ComponentSets { input: core_in, output: core_out },
        periphery: ComponentSets { input: peri_in, output: peri_out },
        shed: ComponentSets { input: shed_in, output: shed_out },
    })
}

/// Traces one element's membership across every consecutive interval of a
/// system's snapshots.
pub fn membership_timeline(
    trace: &Trace,
    system_id: &str,
    element: &str,
    component: Component,
) -> Result<Vec<MembershipEntry>> {
    let snaps = trace.snapshots(system_id)?;
    if snaps.len() < 2 {
        return Err(Error::InsufficientSnapshots {
            system: system_id.into(),
            have: snaps.len(),
            need: 2,
        });
    }
    let mut timeline = Vec::with_capacity(snaps.len() - 1);
    for pair in snaps.windows(2) {
        let before = pair[0].component(component).contains(element);
        let after = pair[1].component(component).contains(element);
        let state = match (before, after) {
            (true, true) => MembershipState::Core,
            (false, true) => MembershipState::Periphery,
            (true, false) => MembershipState::Shed,
            (false, false) => MembershipState::Absent,
        };
        timeline.push(MembershipEntry {
            interval: Interval::new(pair[0].t, pair[1].t)?,
            state,
        });
    }
    Ok(timeline)
}

/// Detects periphery-to-core absorption on every pair of consecutive
/// intervals: elements peripheral on (t_i, t_{i+1}) that are core on
/// (t_{i+1}, t_{i+2}). Returns only non-empty events.
pub fn absorption_events(trace: &Trace, system_id: &str) -> Result<Vec<AbsorptionEvent>> {
    let snaps = trace.snapshots(system_id)?;
    if snaps.len() < 3 {
        return Err(Error::InsufficientSnapshots {
            system: system_id.into(),
            have: snaps.len(),
            need: 3,
        });
    }
    let mut events = Vec::new();
    for window in snaps.windows(3) {
        let first = partition(&window[0], &window[1])?;
        let second = partition(&window[1], &window[2])?;
        let absorbed = ComponentSets {
            input: second.core.input.intersection(&first.periphery.input).cloned().collect(),
            output: second.core.output.intersection(&first.periphery.output).cloned().collect(),
        };
        if !absorbed.is_empty() {
            events.push(AbsorptionEvent {
                first: first.interval,
                second: second.interval,
                absorbed,
            });
        }
    }
    Ok(events)
}

/// Fraction of a subsystem's elements lying in the parent core vs
/// periphery, per component. `None` for a component the subsystem leaves
/// empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentLocation {
    pub in_core: f64,
    pub in_periphery: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemLocation {
    pub interval: Interval,
    pub input: Option<ComponentLocation>,
    pub output: Option<ComponentLocation>,
}

/// Locates a subsystem snapshot within a parent partition.
///
/// The subsystem's elements must be contained in the parent's later-time
/// sets (core plus periphery); per non-empty component the two fractions
/// sum to 1.
pub fn locate_subsystem(
    parent: &CorePeripheryPartition,
    subsystem: &SystemSnapshot,
) -> Result<SubsystemLocation> {
    let locate = |elements: &BTreeSet<String>,
                  core: &BTreeSet<String>,
                  periphery: &BTreeSet<String>|
     -> Result<Option<ComponentLocation>> {
        if elements.is_empty() {
            return Ok(None);
        }
        let mut in_core = 0usize;
        for e in elements {
            if core.contains(e) {
                in_core += 1;
            } else if !periphery.contains(e) {
                return Err(Error::NotASubsystem {
                    detail: alloc::format!(
                        "element {e:?} of {:?} is outside the parent's sets at t={}",
                        subsystem.system_id,
                        parent.interval.to
                    ),
                });
            }
        }
        let n = elements.len() as f64;
        Ok(Some(ComponentLocation {
            in_core: in_core as f64 / n,
            in_periphery: (elements.len() - in_core) as f64 / n,
        }))
    };
    Ok(SubsystemLocation {
        interval: parent.interval,
        input: locate(&subsystem.inputs, &parent.core.input, &parent.periphery.input)?,
        output: locate(&subsystem.outputs, &parent.core.output, &parent.periphery.output)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn set(labels: &[&str]) -> BTreeSet<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    fn snap(id: &str, t: u64, inputs: &[&str], outputs: &[&str]) -> SystemSnapshot {
        SystemSnapshot::new(id, t, set(inputs), set(outputs)).unwrap()
    }

    #[test]
    fn residual_is_new_minus_old() {
        let r = residual(&snap("S", 0, &["a", "b", "c"], &[]), &snap("S", 1, &["b", "c", "d"], &[]))
            .unwrap();
        assert_eq!(r.input_part, set(&["d"]));
        assert!(r.output_part.is_empty());
    }

    #[test]
    fn identical_snapshots_have_empty_residual() {
        let r = residual(&snap("S", 0, &["a"], &["x"]), &snap("S", 1, &["a"], &["x"])).unwrap();
        assert!(r.input_part.is_empty());
        assert!(r.output_part.is_empty());
    }

    #[test]
    fn growth_from_empty_is_all_residual() {
        let r = residual(&snap("S", 0, &[], &[]), &snap("S", 1, &["a"], &[])).unwrap();
        assert_eq!(r.input_part, set(&["a"]));
    }

    #[test]
    fn residual_rejects_mismatched_systems_and_reversed_time() {
        let err = residual(&snap("S", 0, &[], &[]), &snap("T", 1, &[], &[])).unwrap_err();
        assert_eq!(err.code(), "system-mismatch");
        let err = residual(&snap("S", 2, &[], &[]), &snap("S", 1, &[], &[])).unwrap_err();
        assert_eq!(err.code(), "time-order");
    }

    #[test]
    fn partition_splits_into_core_periphery_shed() {
        let p = partition(&snap("S", 0, &["a", "b", "c"], &[]), &snap("S", 1, &["b", "c", "d"], &[]))
            .unwrap();
        assert_eq!(p.core.input, set(&["b", "c"]));
        assert_eq!(p.periphery.input, set(&["d"]));
        assert_eq!(p.shed.input, set(&["a"]));
    }

    #[test]
    fn partition_of_a_snapshot_with_itself_is_all_core() {
        let s = snap("S", 4, &["a", "b"], &["x"]);
        let p = partition(&s, &s).unwrap();
        assert_eq!(p.core.input, s.inputs);
        assert_eq!(p.core.output, s.outputs);
        assert!(p.periphery.is_empty());
        assert!(p.shed.is_empty());
    }

    #[test]
    fn disjoint_snapshots_have_empty_core() {
        let p = partition(&snap("S", 0, &["a"], &[]), &snap("S", 1, &["b"], &[])).unwrap();
        assert!(p.core.input.is_empty());
        assert_eq!(p.periphery.input, set(&["b"]));
        assert_eq!(p.shed.input, set(&["a"]));
    }

    fn three_snapshot_trace(sets: [&[&str]; 3]) -> Trace {
        Trace::from_snapshots(
            vec![
                snap("S", 0, sets[0], &[]),
                snap("S", 1, sets[1], &[]),
                snap("S", 2, sets[2], &[]),
            ],
            vec![],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn timeline_core_then_shed() {
        let trace = three_snapshot_trace([&["e"], &["e"], &[]]);
        let tl = membership_timeline(&trace, "S", "e", Component::Input).unwrap();
        let states: Vec<MembershipState> = tl.iter().map(|m| m.state).collect();
        assert_eq!(states, vec![MembershipState::Core, MembershipState::Shed]);
    }

    #[test]
    fn timeline_periphery_then_core_is_absorption_pattern() {
        let trace = three_snapshot_trace([&[], &["e"], &["e"]]);
        let tl = membership_timeline(&trace, "S", "e", Component::Input).unwrap();
        let states: Vec<MembershipState> = tl.iter().map(|m| m.state).collect();
        assert_eq!(states, vec![MembershipState::Periphery, MembershipState::Core]);
    }

    #[test]
    fn timeline_of_absent_element() {
        let trace = three_snapshot_trace([&["a"], &["a"], &["a"]]);
        let tl = membership_timeline(&trace, "S", "zzz", Component::Input).unwrap();
        let states: Vec<MembershipState> = tl.iter().map(|m| m.state).collect();
        assert_eq!(states, vec![MembershipState::Absent, MembershipState::Absent]);
    }

    #[test]
    fn timeline_needs_two_snapshots() {
        let trace = Trace::from_snapshots(
            vec![snap("S", 0, &["a"], &[])],
            vec![],
            BTreeMap::new(),
        )
        .unwrap();
        let err = membership_timeline(&trace, "S", "a", Component::Input).unwrap_err();
        assert_eq!(err.code(), "insufficient-snapshots");
    }

    #[test]
    fn absorption_detects_enter_then_persist() {
        let trace = three_snapshot_trace([&["a"], &["a", "b"], &["a", "b"]]);
        let events = absorption_events(&trace, "S").unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].absorbed.input, set(&["b"]));
        assert_eq!(events[0].first, Interval { from: 0, to: 1 });
        assert_eq!(events[0].second, Interval { from: 1, to: 2 });
    }

    #[test]
    fn transient_element_is_not_absorbed() {
        let trace = three_snapshot_trace([&["a"], &["a", "b"], &["a"]]);
        assert!(absorption_events(&trace, "S").unwrap().is_empty());
    }

    #[test]
    fn constant_trace_has_no_absorption() {
        let trace = three_snapshot_trace([&["a"], &["a"], &["a"]]);
        assert!(absorption_events(&trace, "S").unwrap().is_empty());
    }

    #[test]
    fn absorption_needs_three_snapshots() {
        let trace = Trace::from_snapshots(
            vec![snap("S", 0, &["a"], &[]), snap("S", 1, &["a"], &[])],
            vec![],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(absorption_events(&trace, "S").unwrap_err().code(), "insufficient-snapshots");
    }

    #[test]
    fn locate_subsystem_fractions() {
        let parent =
            partition(&snap("P", 0, &["a", "b"], &[]), &snap("P", 1, &["a", "b", "c", "d"], &[]))
                .unwrap();
        // a, b in core; c, d in periphery
        let inside_core = snap("sub", 1, &["a", "b"], &[]);
        let loc = locate_subsystem(&parent, &inside_core).unwrap();
        assert_eq!(loc.input.unwrap().in_core, 1.0);
        let periphery_only = snap("sub", 1, &["c", "d"], &[]);
        let loc = locate_subsystem(&parent, &periphery_only).unwrap();
        assert_eq!(loc.input.unwrap().in_periphery, 1.0);
        let half = snap("sub", 1, &["a", "b", "c", "d"], &[]);
        let loc = locate_subsystem(&parent, &half).unwrap().input.unwrap();
        assert_eq!(loc.in_core, 0.5);
        assert_eq!(loc.in_periphery, 0.5);
        assert_eq!(loc.in_core + loc.in_periphery, 1.0);
    }

    #[test]
    fn locate_subsystem_rejects_foreign_elements() {
        let parent = partition(&snap("P", 0, &["a"], &[]), &snap("P", 1, &["a"], &[])).unwrap();
        let sub = snap("sub", 1, &["zzz"], &[]);
        assert_eq!(locate_subsystem(&parent, &sub).unwrap_err().code(), "not-a-subsystem");
    }

    prop_compose! {
        fn arb_label_set(universe: usize)(mask in 0usize..(1 << universe)) -> BTreeSet<String> {
            (0..universe).filter(|i| mask & (1 << i) != 0).map(|i| alloc::format!("e{i}")).collect()
        }
    }

    proptest! {
        #[test]
        fn partition_algebra_holds(
            old_in in arb_label_set(6),
            new_in in arb_label_set(6),
            old_out in arb_label_set(6),
            new_out in arb_label_set(6),
        ) {
            let a = SystemSnapshot::new("S", 0, old_in, old_out).unwrap();
            let b = SystemSnapshot::new("S", 1, new_in, new_out).unwrap();
            let p = partition(&a, &b).unwrap();
            let r = residual(&a, &b).unwrap();
            // periphery equals the residual exactly
            prop_assert_eq!(&p.periphery.input, &r.input_part);
            prop_assert_eq!(&p.periphery.output, &r.output_part);
            for (component, old, new) in [
                (Component::Input, &a.inputs, &b.inputs),
                (Component::Output, &a.outputs, &b.outputs),
            ] {
                let core = p.core.get(component);
                let peri = p.periphery.get(component);
                let shed = p.shed.get(component);
                prop_assert!(core.is_disjoint(peri));
                prop_assert!(shed.is_disjoint(core));
                prop_assert!(shed.is_disjoint(peri));
                let union: BTreeSet<String> = core.union(peri).cloned().collect();
                prop_assert_eq!(&union, new);
                prop_assert_eq!(new.len(), core.len() + peri.len());
                prop_assert_eq!(old.len(), core.len() + shed.len());
            }
        }

        #[test]
        fn timeline_is_consistent_with_partitions(
            sets in proptest::collection::vec(arb_label_set(4), 2..6),
        ) {
            let snaps: Vec<SystemSnapshot> = sets
                .iter()
                .enumerate()
                .map(|(t, s)| SystemSnapshot::new("S", t as u64, s.clone(), BTreeSet::new()).unwrap())
                .collect();
            let trace = Trace::from_snapshots(snaps.clone(), vec![], BTreeMap::new()).unwrap();
            for i in 0..4 {
                let element = alloc::format!("e{i}");
                let tl = membership_timeline(&trace, "S", &element, Component::Input).unwrap();
                prop_assert_eq!(tl.len(), snaps.len() - 1);
                for (entry, pair) in tl.iter().zip(snaps.windows(2)) {
                    let p = partition(&pair[0], &pair[1]).unwrap();
                    let expected = if p.core.input.contains(&element) {
                        MembershipState::Core
                    } else if p.periphery.input.contains(&element) {
                        MembershipState::Periphery
                    } else if p.shed.input.contains(&element) {
                        MembershipState::Shed
                    } else {
                        MembershipState::Absent
                    };
                    prop_assert_eq!(entry.state, expected);
                }
            }
        }
    }
}
