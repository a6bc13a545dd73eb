use std::collections::BTreeMap;

use super::{Assignment, Block, Direction, Identifier, ModelError};

/// One executed scan cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub inputs: Assignment,
    pub outputs: Assignment,
    pub state_after: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub cycles: Vec<Cycle>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Output values of `name` per cycle.
    pub fn output_column(&self, name: &Identifier) -> Vec<Option<bool>> {
        self.cycles.iter().map(|c| c.outputs.get(name)).collect()
    }

    pub fn final_state(&self) -> Option<&Assignment> {
        self.cycles.last().map(|c| &c.state_after)
    }
}

fn require_exact(
    block: &Block,
    values: &Assignment,
    direction: Direction,
) -> Result<(), ModelError> {
    let iface = block.interface();
    for name in iface.names_with(direction) {
        if !values.contains(&name) {
            return Err(ModelError::MissingValue { name, direction });
        }
    }
    for name in values.names() {
        if iface.direction_of(name) != Some(direction) {
            return Err(ModelError::ExtraneousValue(name.clone()));
        }
    }
    Ok(())
}

/// Executes one scan cycle.
///
/// Statements run top to bottom and update the environment immediately.
/// Outputs start each cycle at `false`; temps start unassigned.
pub fn run_cycle(
    block: &Block,
    state: &Assignment,
    inputs: &Assignment,
) -> Result<(Assignment, Assignment), ModelError> {
    require_exact(block, state, Direction::State)?;
    require_exact(block, inputs, Direction::Input)?;
    let iface = block.interface();

    let mut env: BTreeMap<&Identifier, bool> = BTreeMap::new();
    for (name, value) in inputs.iter().chain(state.iter()) {
        env.insert(name, value);
    }
    let outputs = iface.outputs();
    for name in &outputs {
        env.insert(name, false);
    }

    for stmt in block.body() {
        let value = stmt.rhs.eval_with(&|id: &Identifier| env.get(id).copied());
        let value = match value {
            Ok(v) => v,
            Err(ModelError::UnboundVariable(name))
                if iface.direction_of(&name) == Some(Direction::Temp) =>
            {
                return Err(ModelError::UnassignedTemp(name))
            }
            Err(e) => return Err(e),
        };
        env.insert(&stmt.target, value);
    }

    let out = outputs.iter().map(|n| (n.clone(), env[n])).collect();
    let next = iface.states().into_iter().map(|n| {
        let v = env[&n];
        (n, v)
    });
    Ok((out, next.collect()))
}

/// Folds [`run_cycle`] over an input trace.
pub fn simulate(
    block: &Block,
    input_trace: &[Assignment],
    init_state: &Assignment,
) -> Result<Trace, ModelError> {
    let mut state = init_state.clone();
    let mut cycles = Vec::with_capacity(input_trace.len());
    for (cycle, inputs) in input_trace.iter().enumerate() {
        let (outputs, next) = run_cycle(block, &state, inputs)
            .map_err(|e| ModelError::AtCycle { cycle, source: Box::new(e) })?;
        cycles.push(Cycle {
            inputs: inputs.clone(),
            outputs,
            state_after: next.clone(),
        });
        state = next;
    }
    Ok(Trace { cycles })
}
