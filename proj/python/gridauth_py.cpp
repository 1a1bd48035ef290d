// Copyright 2026 The gridauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "gridauth/canonical.h"
#include "gridauth/error.h"
#include "gridauth/fqan.h"
#include "gridauth/gatekeeper.h"
#include "gridauth/gridmap.h"
#include "gridauth/lcmaps.h"
#include "gridauth/subject.h"

namespace py = pybind11;

namespace gridauth {
namespace {

py::list gridmap_entries(const std::string& text) {
  py::list out;
  const GridMapfile file = GridMapfile::parse(text);
  for (const auto& e : file.entries()) {
    out.append(py::make_tuple(e.subject.render(), e.target));
  }
  return out;
}

std::string gridmap_from_entries(const std::vector<std::pair<std::string, std::string>>& rows) {
  GridMapfile file;
  for (const auto& [subject, target] : rows) {
    if (!file.add(SubjectName::parse(subject), target)) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate subject: " + subject);
    }
  }
  return file.emit();
}

std::string gate(const std::string& config_path, const std::string& request, Timestamp now) {
  const GateConfig config = GateConfig::load(config_path);
  GateRequest parsed;
  try {
    parsed = GateRequest::from_document(canonical_parse(request));
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedRequest, e.what());
  }
  return canonical_serialize(gate_handle(config, parsed, now).to_document());
}

}  // namespace
}  // namespace gridauth

PYBIND11_MODULE(_core, m) {
  using namespace gridauth;
  m.doc() = "gridauth core bindings";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "GridauthError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object inst = type(e.what());
      inst.attr("code") = std::string(error_code_name(e.code()));
      inst.attr("details") = py::cast(e.details());
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<Fqan>(m, "Fqan")
      .def_static("parse", &Fqan::parse, py::arg("text"))
      .def_static("is_valid_name", &Fqan::is_valid_name, py::arg("segment"))
      .def_property_readonly("vo", &Fqan::vo)
      .def_property_readonly("groups", &Fqan::groups)
      .def_property_readonly("role", &Fqan::role)
      .def_property_readonly("capability", &Fqan::capability)
      .def("is_membership", &Fqan::is_membership)
      .def("group", &Fqan::group)
      .def("render", &Fqan::render)
      .def("__str__", &Fqan::render)
      .def("__repr__", [](const Fqan& f) { return "Fqan('" + f.render() + "')"; })
      .def("__eq__", [](const Fqan& a, const Fqan& b) { return a == b; })
      .def("__lt__", [](const Fqan& a, const Fqan& b) { return a < b; })
      .def("__hash__", [](const Fqan& f) { return py::hash(py::str(f.render())); });

  py::class_<FqanPattern>(m, "FqanPattern")
      .def_static("parse", &FqanPattern::parse, py::arg("text"))
      .def("matches", py::overload_cast<std::string_view>(&FqanPattern::matches, py::const_),
           py::arg("fqan"))
      .def("matches", py::overload_cast<const Fqan&>(&FqanPattern::matches, py::const_),
           py::arg("fqan"))
      .def_property_readonly("wildcard", &FqanPattern::wildcard)
      .def("render", &FqanPattern::render)
      .def("__str__", &FqanPattern::render);

  m.def("canonical_serialize",
        [](const std::string& json_text) {
          Document doc;
          try {
            doc = Document::parse(json_text);
          } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::kParseError, e.what());
          }
          return canonical_serialize(doc);
        },
        py::arg("json_text"), "Canonical form of an arbitrary JSON text.");
  m.def("canonical_check", [](const std::string& text) { canonical_parse(text); },
        py::arg("text"), "Raises unless `text` is already canonical.");
  m.def("render_subject",
        [](const std::string& text) { return SubjectName::parse(text).render(); },
        py::arg("subject"));
  m.def("encode_subject",
        [](const std::string& text) { return encode_subject(SubjectName::parse(text)); },
        py::arg("subject"));
  m.def("is_valid_gridmap_target", &is_valid_gridmap_target, py::arg("target"));
  m.def("gridmap_parse", &gridmap_entries, py::arg("text"));
  m.def("gridmap_emit", &gridmap_from_entries, py::arg("entries"));
  m.def("gate", &gate, py::arg("config_path"), py::arg("request"), py::arg("now"));
}
