pub mod bench;
pub mod eval;
pub mod frontend;
pub mod profiler;
pub mod selector;
pub mod storage;
