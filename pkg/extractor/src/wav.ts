/** Minimal RIFF/WAVE decoder: 16-bit PCM and 32-bit float, mono or downmixed. */

export interface DecodedAudio {
	sampleRateHz: number
	samples: Float64Array
}

export class WavDecodeError extends Error {}

export function decodeWav(buffer: Buffer): DecodedAudio {
	if (buffer.length < 44 || buffer.toString('ascii', 0, 4) !== 'RIFF' ||
		buffer.toString('ascii', 8, 12) !== 'WAVE') {
		throw new WavDecodeError('not a RIFF/WAVE file')
	}

	let offset = 12
	let format: { audioFormat: number; channels: number; sampleRateHz: number; bitsPerSample: number } | undefined
	let data: Buffer | undefined

	while (offset + 8 <= buffer.length) {
		const chunkId = buffer.toString('ascii', offset, offset + 4)
		const chunkSize = buffer.readUInt32LE(offset + 4)
		const body = buffer.subarray(offset + 8, offset + 8 + chunkSize)
		if (chunkId === 'fmt ') {
			if (body.length < 16) {
				throw new WavDecodeError('fmt chunk too short')
			}
			format = {
				audioFormat: body.readUInt16LE(0),
				channels: body.readUInt16LE(2),
				sampleRateHz: body.readUInt32LE(4),
				bitsPerSample: body.readUInt16LE(14),
			}
		} else if (chunkId === 'data') {
			data = body
		}
		offset += 8 + chunkSize + (chunkSize % 2)
	}

	if (!format || !data) {
		throw new WavDecodeError('missing fmt or data chunk')
	}
	if (format.channels < 1) {
		throw new WavDecodeError('channel count must be >= 1')
	}

	let interleaved: Float64Array
	if (format.audioFormat === 1 && format.bitsPerSample === 16) {
		const n = Math.floor(data.length / 2)
		interleaved = new Float64Array(n)
		for (let i = 0; i < n; i++) {
			interleaved[i] = data.readInt16LE(2 * i) / 32768
		}
	} else if (format.audioFormat === 3 && format.bitsPerSample === 32) {
		const n = Math.floor(data.length / 4)
		interleaved = new Float64Array(n)
		for (let i = 0; i < n; i++) {
			interleaved[i] = data.readFloatLE(4 * i)
		}
	} else {
		throw new WavDecodeError(
			`unsupported encoding: format ${format.audioFormat}, ${format.bitsPerSample} bits`)
	}

	const channels = format.channels
	const frames = Math.floor(interleaved.length / channels)
	const samples = new Float64Array(frames)
	for (let i = 0; i < frames; i++) {
		let sum = 0
		for (let c = 0; c < channels; c++) {
			sum += interleaved[i * channels + c]
		}
		samples[i] = sum / channels
	}
	return { sampleRateHz: format.sampleRateHz, samples }
}

/** 16-bit PCM mono encoder, used by tests and fixture generation. */
export function encodeWavPcm16(samples: Float64Array | number[], sampleRateHz: number): Buffer {
	const n = samples.length
	const data = Buffer.alloc(44 + 2 * n)
	data.write('RIFF', 0, 'ascii')
	data.writeUInt32LE(36 + 2 * n, 4)
	data.write('WAVE', 8, 'ascii')
	data.write('fmt ', 12, 'ascii')
	data.writeUInt32LE(16, 16)
	data.writeUInt16LE(1, 20)
	data.writeUInt16LE(1, 22)
	data.writeUInt32LE(sampleRateHz, 24)
	data.writeUInt32LE(sampleRateHz * 2, 28)
	data.writeUInt16LE(2, 32)
	data.writeUInt16LE(16, 34)
	data.write('data', 36, 'ascii')
	data.writeUInt32LE(2 * n, 40)
	for (let i = 0; i < n; i++) {
		const clamped = Math.max(-1, Math.min(1, samples[i]))
		data.writeInt16LE(Math.round(clamped * 32767), 44 + 2 * i)
	}
	return data
}
