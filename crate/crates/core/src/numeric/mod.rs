pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod roots;
