//! Model checking of ATL and ATL* over concurrent game models.
//!
//! The crate covers complete- and incomplete-information models and several
//! strategy regimes: memoryless, bounded memory (`F_k`), finite memory by
//! iterative deepening, and the decidable perfect-recall cases. Strategies are
//! deterministic finite-state transducers; a quantified subformula is decided
//! by searching for a transducer profile whose product with the game satisfies
//! the path objective on every outcome.
//!
//! ```
//! use atlcheck::{evaluate, fixtures, parse_formula, SemanticsSpec, Outcome};
//!
//! let model = fixtures::fig2_model();
//! let f = parse_formula("<<1>> X X p").unwrap();
//! let verdicts = evaluate(&model, &f, &SemanticsSpec::complete_bounded(2)).unwrap();
//! let s0 = model.state_id("s0").unwrap();
//! assert!(matches!(verdicts[s0].outcome, Outcome::Holds { .. }));
//! ```

pub mod checker;
pub mod cli;
pub mod fixtures;
pub mod logic;
pub mod model;
mod model_parse;
pub mod product;
mod search;
pub mod strategy;
pub mod temporal;

pub use checker::{
    check_atl_fixpoint_complete, check_finite_memory_deepening, check_quantified,
    check_quantified_with, evaluate, evaluate_at, evaluate_with, CheckError, CheckOptions, Engine, InfoMode, MemoryMode, Outcome, SemanticsSpec, Verdict,
    Witness,
};
pub use logic::{classify, parse_formula, strategic_subformulas, substitute, Formula, FragmentTag};
pub use model::{
    observation_class, parse_model, serialize_model, successors, validate, ActionId, GameModel,
    GameModelBuilder, ModelError, Move, ObservationClass, Player, StateId, Violation,
};
pub use product::{build_product, outcome_correspondence_check, ProductSystem};
pub use strategy::{apply_strategy, canonicalize, enumerate_profiles, run_memory, Dfst, StrategyProfile};
pub use temporal::{
    check_universal_ltl, check_universal_objective, exists_lasso, ltl_to_buchi, BuchiAutomaton,
    Lasso, Objective,
};
