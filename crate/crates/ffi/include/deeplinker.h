#ifndef DEEPLINKER_H
#define DEEPLINKER_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum DlStatus {
  DL_STATUS_OK = 0,
  DL_STATUS_NULL_ARGUMENT = 1,
  DL_STATUS_INVALID_UTF8 = 2,
  /*
   The link text is not a valid deep link.
   */
  DL_STATUS_PARSE_ERROR = 3,
  /*
   Segment or param index past the end.
   */
  DL_STATUS_OUT_OF_RANGE = 4,
  /*
   The service could not be created (missing root, unreadable journal).
   */
  DL_STATUS_START_FAILED = 5,
  /*
   The request was answered with a non-success status.
   */
  DL_STATUS_REQUEST_FAILED = 6,
  DL_STATUS_PANIC = 7,
} DlStatus;

/*
 Opaque parsed deep link.
 */
typedef struct DlLink DlLink;

/*
 Opaque service handle.
 */
typedef struct DlService DlService;

/*
 Bytes of a representation and its media type.
 */
typedef struct DlBuffer {
  uint8_t *data;
  size_t len;
  char *media_type;
} DlBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a service over `root`, keeping uploads, the download cache and
 the annotation journal under `state_dir`. `base_iri` may be null.

 # Safety
 String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum DlStatus dl_service_new(const char *root,
                             const char *state_dir,
                             const char *base_iri,
                             struct DlService **out_service);

/*
 # Safety
 `service` must come from [`dl_service_new`] and not be used afterwards.
 */
void dl_service_free(struct DlService *service);

/*
 Resolves a serialized deep link and renders it for `accept` (null means
 HTML). `out_http_status` receives the status the HTTP service would send;
 the buffer holds the body even when resolution fails.

 # Safety
 Pointers must be valid; `out_buffer` is overwritten without being freed.
 */
enum DlStatus dl_service_resolve(const struct DlService *service,
                                 const char *path,
                                 const char *accept,
                                 uint16_t *out_http_status,
                                 struct DlBuffer *out_buffer);

/*
 Attaches `subject predicate object` to the store. `subject` is a deep link
 path or an IRI under the base IRI; `predicate` an IRI or a known prefixed
 name; `object` is a literal unless `object_is_iri` is true.

 # Safety
 String arguments must be NUL-terminated.
 */
enum DlStatus dl_service_annotate(const struct DlService *service,
                                  const char *subject,
                                  const char *predicate,
                                  const char *object,
                                  bool object_is_iri);

/*
 Bookmarks a deep link.

 # Safety
 `subject` must be NUL-terminated.
 */
enum DlStatus dl_service_bookmark(const struct DlService *service, const char *subject);

/*
 Case-insensitive literal search; `out_json` receives the results document.

 # Safety
 `needle` must be NUL-terminated; `out_json` writable.
 */
enum DlStatus dl_service_search(const struct DlService *service,
                                const char *needle,
                                char **out_json);

/*
 # Safety
 `text` must be NUL-terminated; `out_link` writable.
 */
enum DlStatus dl_link_parse(const char *text, struct DlLink **out_link);

/*
 # Safety
 `link` must come from [`dl_link_parse`] and not be used afterwards.
 */
void dl_link_free(struct DlLink *link);

/*
 Number of segments; 0 for a null handle.

 # Safety
 `link` must be null or a live handle.
 */
size_t dl_link_len(const struct DlLink *link);

/*
 # Safety
 `link` must be a live handle; `out_method` writable.
 */
enum DlStatus dl_link_method(const struct DlLink *link, size_t index, char **out_method);

/*
 # Safety
 `link` must be a live handle; `out_count` writable.
 */
enum DlStatus dl_link_param_count(const struct DlLink *link, size_t index, size_t *out_count);

/*
 Decoded param `param` of segment `index`.

 # Safety
 `link` must be a live handle; `out_param` writable.
 */
enum DlStatus dl_link_param(const struct DlLink *link,
                            size_t index,
                            size_t param,
                            char **out_param);

/*
 Canonical serialization of the link.

 # Safety
 `link` must be a live handle; `out_text` writable.
 */
enum DlStatus dl_link_normalize(const struct DlLink *link, char **out_text);

/*
 Message of the last failure on this thread, or null. Free with
 [`dl_string_free`].
 */
char *dl_last_error_message(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void dl_string_free(char *s);

/*
 Releases the memory of a buffer filled by [`dl_service_resolve`].

 # Safety
 `buffer` must be null or point to a buffer filled by this library.
 */
void dl_buffer_free(struct DlBuffer *buffer);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEEPLINKER_H */
