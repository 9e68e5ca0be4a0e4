/** Formatting helpers for numbers received from the service.
 *
 * Rendering code formats served values with these functions and nothing
 * else, so a test can prove that every number on screen is the image of a
 * value the transport delivered.
 */

export function formatPercent(value: number): string {
  return `${(100 * value).toFixed(1)}%`;
}

export function formatProbability(value: number): string {
  return value.toFixed(3);
}

export function formatSmall(value: number): string {
  if (value !== 0 && Math.abs(value) < 0.001) {
    return value.toExponential(3);
  }
  return value.toFixed(4);
}
