/** Canonical JSON text for exported specs: keys sorted recursively, two-space
 * indent, trailing newline. This matches the formatting the service and CLI
 * use when they write spec files, so exports can be compared byte-for-byte. */

type Json = null | boolean | number | string | Json[] | { [key: string]: Json };

function sortDeep(value: Json): Json {
  if (Array.isArray(value)) {
    return value.map(sortDeep);
  }
  if (value !== null && typeof value === "object") {
    const out: { [key: string]: Json } = {};
    for (const key of Object.keys(value).sort()) {
      out[key] = sortDeep(value[key]);
    }
    return out;
  }
  return value;
}

export function canonicalJson(value: unknown): string {
  return JSON.stringify(sortDeep(value as Json), null, 2) + "\n";
}
