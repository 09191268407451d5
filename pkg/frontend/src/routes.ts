/** Route-name canonicalization, mirroring the engine's documented table so
 * table rows can be tied to matched roads: "I-"/"I " -> interstate,
 * "US-"/"US "/"SR-"/"SR "/"S.R." -> state road, anything else local
 * (canonical name = trimmed input). */

const PREFIXES: [string, string][] = [
  ["I-", "I"],
  ["I ", "I"],
  ["US-", "US"],
  ["US ", "US"],
  ["S.R.", "SR"],
  ["SR-", "SR"],
  ["SR ", "SR"],
];

export function routeKey(raw: string): string {
  const name = raw.trim();
  if (!name) return "";
  const upper = name.toUpperCase();
  for (const [prefix, base] of PREFIXES) {
    if (upper.startsWith(prefix)) {
      let rest = name.slice(prefix.length).replace(/^[\s.-]+|[\s.-]+$/g, "");
      if (rest) {
        rest = rest.toUpperCase().replace(/[\s.]+/g, "-");
        return `${base}-${rest}`;
      }
    }
  }
  return name;
}
