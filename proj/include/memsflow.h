/* memsflow: MEMS design-flow kernel.
 *
 * C interface over the C++ core. Every object is an opaque handle owned by
 * the caller and released with the matching *_free function. Functions
 * return MF_OK (0) on success; on failure they return a status that
 * partitions the error class and leave a message in mf_last_error().
 * All file writes are atomic (temp file + rename).
 */
#ifndef MEMSFLOW_H
#define MEMSFLOW_H

#include <stddef.h>

#if defined(_WIN32)
#define MEMSFLOW_API __declspec(dllexport)
#else
#define MEMSFLOW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mf_status {
    MF_OK = 0,
    MF_ERR_PARSE = 2,    /* malformed input file */
    MF_ERR_SEMANTIC = 3, /* valid syntax, invalid design or flow */
    MF_ERR_IO = 4        /* missing or unwritable file */
} mf_status;

typedef struct mf_netlist mf_netlist;
typedef struct mf_stack mf_stack;
typedef struct mf_layout mf_layout;
typedef struct mf_solid mf_solid;

/* Message describing the most recent failure on this thread. */
MEMSFLOW_API const char* mf_last_error(void);

/* Frees strings returned through char** out-parameters. */
MEMSFLOW_API void mf_string_free(char* s);

/* ---- netlist ---------------------------------------------------------- */
MEMSFLOW_API mf_status mf_netlist_read(const char* path, mf_netlist** out);
MEMSFLOW_API mf_status mf_netlist_write(const mf_netlist* n, const char* path);
MEMSFLOW_API void mf_netlist_free(mf_netlist* n);
MEMSFLOW_API size_t mf_netlist_instance_count(const mf_netlist* n);
/* kind: beam | mass | lincomb | biascomb | anchor */
MEMSFLOW_API size_t mf_netlist_kind_count(const mf_netlist* n, const char* kind);
/* Flow-readiness report; empty string means ready. */
MEMSFLOW_API mf_status mf_netlist_validate(const mf_netlist* n, const mf_stack* s, char** report);

/* ---- process stack ----------------------------------------------------- */
MEMSFLOW_API mf_status mf_stack_read(const char* path, mf_stack** out);
MEMSFLOW_API void mf_stack_free(mf_stack* s);

/* ---- layout (CIF) and solid (ESM) -------------------------------------- */
MEMSFLOW_API mf_status mf_layout_read(const char* path, mf_layout** out);
MEMSFLOW_API mf_status mf_layout_write(const mf_layout* l, const char* path);
MEMSFLOW_API void mf_layout_free(mf_layout* l);
MEMSFLOW_API size_t mf_layout_shape_count(const mf_layout* l);

MEMSFLOW_API mf_status mf_solid_read(const char* path, mf_solid** out);
MEMSFLOW_API mf_status mf_solid_write(const mf_solid* s, const char* path);
MEMSFLOW_API void mf_solid_free(mf_solid* s);
MEMSFLOW_API size_t mf_solid_prism_count(const mf_solid* s);

/* ---- inter-level flows -------------------------------------------------- */
MEMSFLOW_API mf_status mf_netlist_to_layout(const mf_netlist* n, const mf_stack* s, mf_layout** out);
MEMSFLOW_API mf_status mf_netlist_to_solid(const mf_netlist* n, const mf_stack* s, mf_solid** out);
MEMSFLOW_API mf_status mf_solid_to_layout(const mf_solid* sm, const mf_stack* s, mf_layout** out);
MEMSFLOW_API mf_status mf_layout_to_solid(const mf_layout* l, const mf_stack* s, mf_solid** out);

/* Pattern extraction. rules_path may be NULL for library defaults. The
 * report lists recognition counts and unrecognized shapes with reasons. */
MEMSFLOW_API mf_status mf_extract(const mf_layout* l, const mf_stack* s, const char* rules_path,
                                  mf_netlist** out, char** report);

/* Closed-triangle verification: netlist->solid->layout against
 * netlist->layout, exact polygon multisets per layer. MF_OK when equal;
 * MF_ERR_SEMANTIC with the per-layer report otherwise. */
MEMSFLOW_API mf_status mf_verify_triangle(const mf_netlist* n, const mf_stack* s, char** report);

/* ---- numerics pipelines (file to file) ---------------------------------- */
/* Assembles the structural model of a netlist and writes Matrix Market
 * files <out_prefix>.{M,K,Cd,B,C}.mm plus <out_prefix>.manifest.
 * input/output specs are "<node>:<dof>[:<scale>]" with dof one of
 * ux uy uz rx ry rz; a rigid mass's master node is addressed by the
 * instance name. */
MEMSFLOW_API mf_status mf_fea_assemble(const char* netlist_path, const char* stack_path,
                                       int refine, const char* input_spec,
                                       const char* output_spec, double alpha, double beta,
                                       const char* out_prefix, char** summary);

/* Arnoldi reduction of an exported system. mode: "direct" or "shift:<s0>".
 * Writes <out_prefix>.{A,b,c}.mm and <out_prefix>.manifest. */
MEMSFLOW_API mf_status mf_mor_reduce(const char* fea_prefix, int q, const char* mode,
                                     const char* out_prefix, char** summary);

/* Transient / AC runs driven by a key=value config file (see README).
 * Results are written as CSV. */
MEMSFLOW_API mf_status mf_sim_transient(const char* config_path, const char* out_csv,
                                        char** summary);
MEMSFLOW_API mf_status mf_sim_ac(const char* config_path, const char* out_csv, char** summary);

/* ---- bundled demo pipelines --------------------------------------------- */
MEMSFLOW_API mf_status mf_fixture_write(const char* which, const char* dir);
MEMSFLOW_API mf_status mf_demo_gyro(const char* workdir, char** report);
/* q <= 0 selects the default order 10. */
MEMSFLOW_API mf_status mf_demo_accel(const char* workdir, int q, char** report);

#ifdef __cplusplus
}
#endif

#endif /* MEMSFLOW_H */
