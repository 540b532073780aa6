#include <pybind11/pybind11.h>

#include "framecl/types.hpp"

namespace py = pybind11;

void bind_store(py::module_& m);
void bind_dataset(py::module_& m);
void bind_prompt(py::module_& m);
void bind_parser(py::module_& m);
void bind_eval(py::module_& m);
void bind_runner(py::module_& m);

PYBIND11_MODULE(_framecl, m) {
  m.doc() = "Frame-semantic parsing with in-context learning";
  m.attr("__version__") = std::string(framecl::kVersion);
  bind_store(m);
  bind_dataset(m);
  bind_prompt(m);
  bind_parser(m);
  bind_eval(m);
  bind_runner(m);
}
