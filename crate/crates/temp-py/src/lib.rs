use pyo3::prelude::*;
#[pymodule]
fn temp_py(_m: &Bound<PyModule>) -> PyResult<()> { Ok(()) }
