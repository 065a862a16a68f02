//! Benchmark tasks, linear readouts and evaluation metrics.

pub mod double_scroll;
pub mod forecast;
pub mod metrics;
pub mod readout;
pub mod tasks;

pub use double_scroll::{double_scroll_integrate, DoubleScroll, DoubleScrollState};
pub use forecast::{closed_loop_forecast, forecast_capacities, Forecast};
pub use metrics::{accuracy, capacity, mean_squared_error};
pub use readout::{train_readout, train_readouts, LinearReadout};
pub use tasks::{gen_double_scroll, gen_memory, gen_parity, gen_xor, TaskDataset};
