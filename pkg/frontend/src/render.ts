// Small DOM helpers shared by the components. Scores are rendered with
// String(score): the text content of a score cell is exactly the JSON value
// the service sent, so fidelity tests can compare verbatim.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function scoreCell(value: number): HTMLElement {
  const cell = el("span", "score", String(value));
  cell.dataset.score = String(value);
  return cell;
}

export function banner(container: HTMLElement, kind: "error" | "info", message: string,
                       onRetry?: () => void): void {
  const box = el("div", `banner banner-${kind}`, message);
  if (onRetry) {
    const retry = el("button", "banner-retry", "retry");
    retry.addEventListener("click", () => {
      box.remove();
      onRetry();
    });
    box.append(" ", retry);
  }
  container.prepend(box);
}

export function clearBanners(container: HTMLElement): void {
  container.querySelectorAll(".banner").forEach((node) => node.remove());
}
