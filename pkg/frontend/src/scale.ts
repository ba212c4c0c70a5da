/** Linear and log10 axis scales with decade ticks, no DOM dependencies. */

export interface Scale {
  (value: number): number;
  ticks(): { value: number; label: string }[];
  minorTicks(): number[];
  domain: [number, number];
}

function formatDecade(exp: number): string {
  if (exp === 0) return "1";
  if (exp === 1) return "10";
  return `1e${exp}`;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d0 > 0 && d1 > d0)) throw new Error(`log scale needs 0 < min < max, got [${d0}, ${d1}]`);
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const scale = ((value: number) =>
    r0 + ((Math.log10(value) - l0) / (l1 - l0)) * (r1 - r0)) as Scale;
  scale.domain = [d0, d1];
  scale.ticks = () => {
    const out: { value: number; label: string }[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push({ value: 10 ** e, label: formatDecade(e) });
    }
    return out;
  };
  scale.minorTicks = () => {
    const out: number[] = [];
    for (let e = Math.floor(l0) - 1; e <= Math.floor(l1) + 1; e++) {
      for (let m = 2; m <= 9; m++) {
        const v = m * 10 ** e;
        if (v >= d0 * (1 - 1e-12) && v <= d1 * (1 + 1e-12)) out.push(v);
      }
    }
    return out;
  };
  return scale;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d1 > d0)) throw new Error(`linear scale needs min < max, got [${d0}, ${d1}]`);
  const [r0, r1] = range;
  const scale = ((value: number) => r0 + ((value - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  scale.domain = [d0, d1];
  const span = d1 - d0;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  scale.ticks = () => {
    const s = step * mult;
    const out: { value: number; label: string }[] = [];
    for (let v = Math.ceil(d0 / s) * s; v <= d1 + 1e-12 * span; v += s) {
      out.push({ value: v, label: `${Number(v.toPrecision(10))}` });
    }
    return out;
  };
  scale.minorTicks = () => [];
  return scale;
}

/** Smallest/largest positive values across series, padded to full decades. */
export function decadeDomain(series: number[][], padFraction = 0.0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const values of series) {
    for (const v of values) {
      if (v > 0 && Number.isFinite(v)) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (!(lo < hi)) throw new Error("no positive finite data for a log axis");
  const lexp0 = Math.floor(Math.log10(lo) - padFraction);
  const lexp1 = Math.ceil(Math.log10(hi) + padFraction);
  return [10 ** lexp0, 10 ** lexp1];
}
