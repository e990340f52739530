pub mod curves;
pub mod diffsig;
pub mod ecmatch;
pub mod ff;
pub mod imstruct;
pub mod lpoly;
pub mod pipeline;
pub mod quadfield;
