/** Alignment text files: start_sec<TAB>end_sec<TAB>label, '#' comments. */

export interface AlignmentEntry {
	startSec: number
	endSec: number
	label: string
}

export class AlignmentFormatError extends Error {}

export function validateEntries(entries: AlignmentEntry[]): void {
	let prevEnd = -Infinity
	for (const entry of entries) {
		if (!Number.isFinite(entry.startSec) || !Number.isFinite(entry.endSec)) {
			throw new AlignmentFormatError('alignment times must be finite')
		}
		if (!(entry.startSec < entry.endSec)) {
			throw new AlignmentFormatError(
				`empty or negative span [${entry.startSec}, ${entry.endSec}]`)
		}
		if (entry.startSec < prevEnd) {
			throw new AlignmentFormatError(
				`overlapping or unsorted entries at ${entry.startSec}`)
		}
		if (!entry.label) {
			throw new AlignmentFormatError('labels must be non-empty')
		}
		prevEnd = entry.endSec
	}
}

export function encodeAlignment(entries: AlignmentEntry[]): string {
	validateEntries(entries)
	if (entries.length === 0) {
		return ''
	}
	return entries.map(e => `${e.startSec}\t${e.endSec}\t${e.label}`).join('\n') + '\n'
}

export function decodeAlignment(text: string): AlignmentEntry[] {
	const entries: AlignmentEntry[] = []
	for (const [index, raw] of text.split('\n').entries()) {
		const line = raw.trim()
		if (!line || line.startsWith('#')) {
			continue
		}
		const fields = line.split('\t')
		if (fields.length !== 3) {
			throw new AlignmentFormatError(`line ${index + 1}: expected 3 tab-separated fields`)
		}
		const startSec = Number(fields[0])
		const endSec = Number(fields[1])
		if (Number.isNaN(startSec) || Number.isNaN(endSec)) {
			throw new AlignmentFormatError(`line ${index + 1}: non-numeric time field`)
		}
		entries.push({ startSec, endSec, label: fields[2] })
	}
	validateEntries(entries)
	return entries
}
